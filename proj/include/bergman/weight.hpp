#pragma once

#include <cmath>
#include <string>

namespace bergman {

/// Weight phi given through its density e^{-phi}: 1, delta^alpha or delta^{2 alpha (j+1)}.
struct Weight {
    enum class Kind { zero, neg_log_distance, fiber_scaled };

    Kind kind = Kind::zero;
    double alpha = 0.0;
    int j = 0;

    static Weight zero() { return {}; }
    static Weight neg_log_distance(double alpha);
    static Weight fiber_scaled(double alpha, int j);

    /// Power of delta in the density.
    double exponent() const {
        switch (kind) {
            case Kind::zero: return 0.0;
            case Kind::neg_log_distance: return alpha;
            case Kind::fiber_scaled: return 2.0 * alpha * (j + 1);
        }
        return 0.0;
    }

    bool distance_based() const { return kind != Kind::zero; }

    /// Density from a signed distance; no log/exp round trip.
    double density(double delta) const {
        if (kind == Kind::zero) return 1.0;
        if (delta <= 0.0) return 0.0;
        double e = exponent();
        double r = std::nearbyint(e);
        if (r == e && r <= 64.0) {
            double p = 1.0, b = delta;
            for (long n = static_cast<long>(r); n > 0; n >>= 1, b *= b)
                if (n & 1) p *= b;
            return p;
        }
        return std::pow(delta, e);
    }

    std::string describe() const;
    bool operator==(const Weight&) const = default;
};

}  // namespace bergman
