#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eta {

// Scalar observable g of a state vector u. Observables that are decided by a
// single coordinate (the max family) expose that coordinate so the training
// loop can freeze it between index refreshes; for such observables the frozen
// coordinate replaces g during gradient steps.
class Observable {
public:
    virtual ~Observable() = default;

    virtual double value(std::span<const double> u) const = 0;

    // Subgradient of g at u (0 at |.| kinks).
    virtual void grad(std::span<const double> u, std::span<double> du) const = 0;

    // Component that triggers the observable's value, when the notion
    // applies; nullopt for plain scalar observables.
    virtual std::optional<std::size_t> triggering_component(std::span<const double>) const {
        return std::nullopt;
    }

    // True when g(u) is entirely attributable to the triggering component, so
    // the frozen coordinate is a faithful stand-in for g between refreshes.
    virtual bool component_replaces_value() const { return false; }

    virtual std::string name() const = 0;
};

// g(u) = u[0] for scalar states.
std::unique_ptr<Observable> make_identity_observable();

// g(u) = max_j u[j]; triggering component is the argmax (first on ties).
std::unique_ptr<Observable> make_max_observable();

// g(u) = sum_j weights[j] * |u[j]|; the triggering component is the largest
// contribution, tracked for diagnostics but not substituted for g.
std::unique_ptr<Observable> make_weighted_abs_observable(std::vector<double> weights);

// "identity" | "max" | "weighted_abs:w1,w2,..."
std::unique_ptr<Observable> make_observable(const std::string& descriptor);

}  // namespace eta
