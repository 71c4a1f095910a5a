#include "weights.hpp"

#include <algorithm>
#include <cmath>

namespace mkge {

namespace {

constexpr double kLogClamp = 1e-12;

double sign_or_zero(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

} // namespace

RestrictionKind restriction_from_name(const std::string& name) {
    if (name == "none") return RestrictionKind::none;
    if (name == "tanh") return RestrictionKind::tanh;
    if (name == "sigmoid") return RestrictionKind::sigmoid;
    if (name == "softmax") return RestrictionKind::softmax;
    throw Error(ErrorCode::config,
                "unknown restriction '" + name + "' (valid: none, tanh, sigmoid, softmax)");
}

const char* restriction_name(RestrictionKind kind) {
    switch (kind) {
        case RestrictionKind::none: return "none";
        case RestrictionKind::tanh: return "tanh";
        case RestrictionKind::sigmoid: return "sigmoid";
        default: return "softmax";
    }
}

std::vector<double> restrict_weights(std::span<const double> raw, RestrictionKind kind) {
    std::vector<double> out(raw.begin(), raw.end());
    switch (kind) {
        case RestrictionKind::none:
            break;
        case RestrictionKind::tanh:
            for (double& x : out) x = std::tanh(x);
            break;
        case RestrictionKind::sigmoid:
            for (double& x : out) x = 1.0 / (1.0 + std::exp(-x));
            break;
        case RestrictionKind::softmax: {
            const double max = *std::max_element(out.begin(), out.end());
            double sum = 0.0;
            for (double& x : out) {
                x = std::exp(x - max);
                sum += x;
            }
            for (double& x : out) x /= sum;
            break;
        }
    }
    return out;
}

std::vector<double> restriction_backward(std::span<const double> omega,
                                         std::span<const double> grad_omega,
                                         RestrictionKind kind) {
    std::vector<double> grad(omega.size(), 0.0);
    switch (kind) {
        case RestrictionKind::none:
            std::copy(grad_omega.begin(), grad_omega.end(), grad.begin());
            break;
        case RestrictionKind::tanh:
            for (std::size_t i = 0; i < omega.size(); ++i) {
                grad[i] = grad_omega[i] * (1.0 - omega[i] * omega[i]);
            }
            break;
        case RestrictionKind::sigmoid:
            for (std::size_t i = 0; i < omega.size(); ++i) {
                grad[i] = grad_omega[i] * omega[i] * (1.0 - omega[i]);
            }
            break;
        case RestrictionKind::softmax: {
            double dot = 0.0;
            for (std::size_t i = 0; i < omega.size(); ++i) dot += grad_omega[i] * omega[i];
            for (std::size_t i = 0; i < omega.size(); ++i) {
                grad[i] = omega[i] * (grad_omega[i] - dot);
            }
            break;
        }
    }
    return grad;
}

double dirichlet_reg(std::span<const double> omega, const DirichletRegConfig& cfg,
                     std::span<double> grad_omega) {
    if (!cfg.enabled || cfg.lambda_dir == 0.0) return 0.0;

    double l1 = 0.0;
    for (double w : omega) l1 += std::abs(w);
    if (l1 == 0.0) {
        throw Error(ErrorCode::runtime, "dirichlet_reg: all-zero weight vector");
    }

    const double scale = -cfg.lambda_dir * (cfg.alpha - 1.0);
    const double n = static_cast<double>(omega.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double mag = std::max(std::abs(omega[i]), kLogClamp);
        loss += scale * (std::log(mag) - std::log(l1));
    }
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double mag = std::max(std::abs(omega[i]), kLogClamp);
        const double s = sign_or_zero(omega[i]);
        grad_omega[i] += scale * (s / mag - n * s / l1);
    }
    return loss;
}

double l1_reg(std::span<const double> omega, double lambda, std::span<double> grad_omega) {
    if (lambda == 0.0) return 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        loss += lambda * std::abs(omega[i]);
        grad_omega[i] += lambda * sign_or_zero(omega[i]);
    }
    return loss;
}

} // namespace mkge
