#include "msm/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msm {

NoiseParams make_noise_params(double a, double gamma, double sigma_total2) {
    if (!(a > 0.0)) throw std::invalid_argument("noise: impulsive index A must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("noise: gamma must be > 0");
    if (!(sigma_total2 > 0.0)) throw std::invalid_argument("noise: total power must be > 0");
    NoiseParams p;
    p.a = a;
    p.gamma = gamma;
    p.sigma_total2 = sigma_total2;
    p.sigma_i2 = sigma_total2 / (1.0 + gamma);
    p.sigma_g2 = gamma * p.sigma_i2;
    return p;
}

NoiseParams params_from_snr(double snr_db, double gamma, double a, double signal_power) {
    if (!(signal_power > 0.0)) throw std::invalid_argument("noise: signal power must be > 0");
    const double sigma_total2 = signal_power * std::pow(10.0, -snr_db / 10.0);
    return make_noise_params(a, gamma, sigma_total2);
}

double calibrate_impulsive_index(double p_star, int sps) {
    if (!(p_star > 0.0 && p_star < 1.0))
        throw std::invalid_argument("calibrate_impulsive_index: p_star must be in (0, 1)");
    if (sps < 1) throw std::invalid_argument("calibrate_impulsive_index: sps must be >= 1");
    return -std::log1p(-p_star) / static_cast<double>(sps);
}

double symbol_hit_probability(double a, int sps) {
    if (a < 0.0) throw std::invalid_argument("symbol_hit_probability: A must be >= 0");
    if (sps < 1) throw std::invalid_argument("symbol_hit_probability: sps must be >= 1");
    return -std::expm1(-a * static_cast<double>(sps));
}

double sample_hit_probability(double a) {
    if (a < 0.0) throw std::invalid_argument("sample_hit_probability: A must be >= 0");
    return -std::expm1(-a);
}

double mixture_sigma_m2(const NoiseParams& params, int m) {
    if (m < 0) throw std::invalid_argument("mixture_sigma_m2: m must be >= 0");
    return params.sigma_g2 * (static_cast<double>(m) / (params.a * params.gamma) + 1.0);
}

NoiseRealization sample_noise(const NoiseParams& params, int n_samples, RandomStream& rng) {
    if (n_samples < 1) throw std::invalid_argument("sample_noise: n_samples must be >= 1");
    if (!(params.a > 0.0 && params.gamma > 0.0 && params.sigma_g2 > 0.0))
        throw std::invalid_argument("sample_noise: invalid params");

    NoiseRealization r;
    r.params = params;
    r.counts.resize(n_samples);
    r.z_i.resize(n_samples);
    r.z_q.resize(n_samples);
    for (int n = 0; n < n_samples; ++n) {
        const int m = rng.poisson(params.a);
        r.counts[n] = m;
        const double branch_sd = std::sqrt(mixture_sigma_m2(params, m) / 2.0);
        r.z_i[n] = branch_sd * rng.normal();
        r.z_q[n] = branch_sd * rng.normal();
    }
    return r;
}

std::vector<int> hit_symbols(const std::vector<int>& counts, int sps) {
    if (sps < 1) throw std::invalid_argument("hit_symbols: sps must be >= 1");
    if (counts.size() % static_cast<std::size_t>(sps) != 0)
        throw std::invalid_argument("hit_symbols: sample count not divisible by sps");
    std::vector<int> hits;
    const int n_symbols = static_cast<int>(counts.size()) / sps;
    for (int i = 0; i < n_symbols; ++i) {
        for (int n = i * sps; n < (i + 1) * sps; ++n) {
            if (counts[n] > 0) {
                hits.push_back(i);
                break;
            }
        }
    }
    return hits;
}

double kl_bernoulli(double q, double p) {
    if (!(q > 0.0 && q < 1.0) || !(p > 0.0 && p < 1.0))
        throw std::invalid_argument("kl_bernoulli: arguments must be in the open interval (0, 1)");
    return q * std::log(q / p) + (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
}

ConcentrationReport concentration_epsilon(double p, int symbols, double delta) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("concentration_epsilon: p must be in (0, 1)");
    if (symbols < 1) throw std::invalid_argument("concentration_epsilon: symbols must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("concentration_epsilon: delta must be in (0, 1)");

    ConcentrationReport rep;
    rep.p = p;
    rep.symbols = symbols;
    rep.delta = delta;
    rep.epsilon =
        std::sqrt(2.0 * p * (1.0 - p) / static_cast<double>(symbols) * std::log(2.0 / delta));
    rep.lo = p - rep.epsilon;
    rep.hi = p + rep.epsilon;
    rep.in_validity_range = rep.epsilon < std::min(p, 1.0 - p);
    return rep;
}

double concentration_epsilon_exact(double p, int symbols, double delta) {
    const double target = std::log(2.0 / delta) / static_cast<double>(symbols);
    // KL(p+eps || p) is increasing in eps on (0, 1-p); bisect.
    double lo = 0.0;
    double hi = 1.0 - p - 1e-15;
    if (kl_bernoulli(p + hi, p) < target)
        throw std::domain_error("concentration_epsilon_exact: delta unattainable for this K");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kl_bernoulli(p + mid, p) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace msm
