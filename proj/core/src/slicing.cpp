#include <algorithm>
#include <limits>

#include "isolab/measures.hpp"

namespace isolab {

namespace {

// Integral of sin^k over [0, psi], by Gauss–Legendre so that small caps keep
// full relative accuracy.
double sine_power_integral(int k, double psi) {
    if (k == 0) return psi;
    const GaussRule& rule = gauss_legendre(32);
    const double half = 0.5 * psi;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * std::pow(std::sin(half * (1.0 + rule.nodes[i])), k);
    }
    return sum * half;
}

}  // namespace

LayerProfiles layer_profiles(int n, double R) {
    if (n < 2) throw DomainError("layer_profiles: dimension must be at least 2");
    if (!(R > 1)) throw DomainError("layer_profiles: the ball must not contain the origin (R > 1)");
    const double wn1 = unit_ball_volume(n - 1);
    const double sn1 = (n - 1) * wn1;

    LayerProfiles p;
    p.n = n;
    p.R = R;
    p.alpha = [n, sn1](double t) {
        const double q = 1.0 - t * t;
        if (q <= 0) return n == 3 ? sn1 : (n == 2 ? std::numeric_limits<double>::infinity() : 0.0);
        return sn1 * std::pow(q, 0.5 * (n - 3));
    };
    p.beta = [n, wn1](double t) {
        const double q = 1.0 - t * t;
        return q <= 0 ? 0.0 : wn1 * std::pow(q, 0.5 * (n - 1));
    };
    if (std::isinf(R)) {
        p.alpha_R = p.alpha;
        p.beta_R = p.beta;
        return p;
    }
    p.alpha_R = [n, R, sn1](double t) {
        if (t <= -1.0 || t >= 1.0) {
            if (n == 3) return sn1 * (R + t) / R;
            return n == 2 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        // sin^2 of the angle chi with cos chi = t + (t^2 - 1) / (2R), factored
        // to avoid cancellation near the poles.
        const double s2 = (1.0 - t * t) * (1.0 + (1.0 + t) / (2.0 * R)) * (1.0 - (1.0 - t) / (2.0 * R));
        return sn1 * std::pow(s2, 0.5 * (n - 3)) * (R + t) / R;
    };
    p.beta_R = [n, R, sn1](double t) {
        if (t <= -1.0 || t >= 1.0) return 0.0;
        const double s = R + t;
        // 1 - cos psi = (1 - t^2) / (2 s R)
        const double psi = 2.0 * std::asin(std::sqrt((1.0 - t * t) / (4.0 * s * R)));
        return std::pow(s, n - 1) * sn1 * sine_power_integral(n - 2, psi);
    };
    return p;
}

SlicingResult offcenter_ball_slicing(int n, double R, const RadialProfile& g_r,
                                     const std::vector<double>& kinks, const QuadConfig& cfg) {
    if (!(R > 1)) throw DomainError("offcenter_ball_slicing: R must exceed 1");
    const LayerProfiles p = layer_profiles(n, R);
    const double sn1 = (n - 1) * unit_ball_volume(n - 1);

    // t = -cos u absorbs the endpoint behaviour of both profiles.
    std::vector<double> breaks;
    for (double k : kinks) {
        const double t = k - R;
        if (t > -1.0 && t < 1.0) breaks.push_back(std::acos(-t));
    }
    auto perimeter_integrand = [&](double u) {
        const double t = -std::cos(u);
        const double su = std::sin(u);
        // alpha_R(t) sin u with the (1 - t^2)^{(n-3)/2} factor merged into sin u.
        const double a = (1.0 + (1.0 + t) / (2.0 * R)) * (1.0 - (1.0 - t) / (2.0 * R));
        const double w = sn1 * std::pow(su, n - 2) * std::pow(a, 0.5 * (n - 3)) * (R + t) / R;
        return w * g_r(R + t);
    };
    auto volume_integrand = [&](double u) {
        const double t = -std::cos(u);
        return p.beta_R(t) * std::sin(u) * g_r(R + t);
    };
    const QuadResult P = integrate(perimeter_integrand, 0.0, kPi, breaks, cfg);
    const QuadResult V = integrate(volume_integrand, 0.0, kPi, breaks, cfg);

    SlicingResult out;
    out.perimeter = {P.value, P.error, MeasureMethod::slicing_1d, P.evaluations, std::nullopt};
    out.volume = {V.value, V.error, MeasureMethod::slicing_1d, V.evaluations, std::nullopt};
    if (!P.converged || !V.converged) {
        throw ToleranceError("offcenter_ball_slicing: tolerance unmet", P.value,
                             std::max(P.error, V.error));
    }
    return out;
}

}  // namespace isolab
