#include "eta/observable.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eta {

namespace {

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

class IdentityObservable final : public Observable {
public:
    double value(std::span<const double> u) const override {
        if (u.size() != 1) throw std::invalid_argument("identity observable expects 1D state");
        return u[0];
    }
    void grad(std::span<const double> u, std::span<double> du) const override {
        if (u.size() != 1 || du.size() != 1)
            throw std::invalid_argument("identity observable expects 1D state");
        du[0] = 1.0;
    }
    std::string name() const override { return "identity"; }
};

class MaxObservable final : public Observable {
public:
    double value(std::span<const double> u) const override {
        if (u.empty()) throw std::invalid_argument("empty state");
        double best = u[0];
        for (double v : u) best = std::max(best, v);
        return best;
    }
    void grad(std::span<const double> u, std::span<double> du) const override {
        const std::size_t j = argmax(u);
        for (auto& d : du) d = 0.0;
        du[j] = 1.0;
    }
    std::optional<std::size_t> triggering_component(std::span<const double> u) const override {
        return argmax(u);
    }
    bool component_replaces_value() const override { return true; }
    std::string name() const override { return "max"; }

private:
    static std::size_t argmax(std::span<const double> u) {
        if (u.empty()) throw std::invalid_argument("empty state");
        std::size_t j = 0;
        for (std::size_t i = 1; i < u.size(); ++i) {
            if (u[i] > u[j]) j = i;
        }
        return j;
    }
};

class WeightedAbsObservable final : public Observable {
public:
    explicit WeightedAbsObservable(std::vector<double> weights) : weights_(std::move(weights)) {
        if (weights_.empty()) throw std::invalid_argument("weighted_abs needs weights");
    }
    double value(std::span<const double> u) const override {
        check(u);
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) acc += weights_[i] * std::abs(u[i]);
        return acc;
    }
    void grad(std::span<const double> u, std::span<double> du) const override {
        check(u);
        for (std::size_t i = 0; i < u.size(); ++i) du[i] = weights_[i] * sign_or_zero(u[i]);
    }
    std::optional<std::size_t> triggering_component(std::span<const double> u) const override {
        check(u);
        std::size_t j = 0;
        double best = weights_[0] * std::abs(u[0]);
        for (std::size_t i = 1; i < u.size(); ++i) {
            const double c = weights_[i] * std::abs(u[i]);
            if (c > best) {
                best = c;
                j = i;
            }
        }
        return j;
    }
    std::string name() const override {
        std::ostringstream ss;
        ss << "weighted_abs:";
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (i) ss << ',';
            ss << weights_[i];
        }
        return ss.str();
    }

private:
    void check(std::span<const double> u) const {
        if (u.size() != weights_.size())
            throw std::invalid_argument("weighted_abs dimension mismatch");
    }
    std::vector<double> weights_;
};

}  // namespace

std::unique_ptr<Observable> make_identity_observable() {
    return std::make_unique<IdentityObservable>();
}

std::unique_ptr<Observable> make_max_observable() { return std::make_unique<MaxObservable>(); }

std::unique_ptr<Observable> make_weighted_abs_observable(std::vector<double> weights) {
    return std::make_unique<WeightedAbsObservable>(std::move(weights));
}

std::unique_ptr<Observable> make_observable(const std::string& descriptor) {
    if (descriptor == "identity") return make_identity_observable();
    if (descriptor == "max") return make_max_observable();
    const std::string prefix = "weighted_abs:";
    if (descriptor.rfind(prefix, 0) == 0) {
        std::vector<double> weights;
        std::stringstream ss(descriptor.substr(prefix.size()));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                weights.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad weight in observable descriptor: " + descriptor);
            }
        }
        return make_weighted_abs_observable(std::move(weights));
    }
    throw std::invalid_argument("unknown observable: " + descriptor);
}

}  // namespace eta
