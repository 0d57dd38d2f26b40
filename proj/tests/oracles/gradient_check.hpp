#pragma once

// Central finite differences over every parameter of a DenseNet. Test-only.

#include <liit/dense_net.hpp>

#include <algorithm>
#include <cmath>
#include <span>

namespace oracle {

/// Max over parameters of |analytic - numeric| / max(|analytic| + |numeric|, 1e-8).
inline double max_relative_gradient_error(liit::DenseNet net, const liit::Matrix& X, std::span<const int> y,
                                          double delta = 1e-5) {
    const auto analytic = liit::loss_and_grads(net, X, y).grads;
    double worst = 0.0;
    auto check = [&](auto& param, const auto& grad) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
            const double saved = param.data()[i];
            param.data()[i] = saved + delta;
            const double up = liit::loss(net, X, y);
            param.data()[i] = saved - delta;
            const double down = liit::loss(net, X, y);
            param.data()[i] = saved;
            const double numeric = (up - down) / (2.0 * delta);
            const double a = grad.data()[i];
            const double err = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
            worst = std::max(worst, err);
        }
    };
    auto& p = net.params;
    check(p.w1, analytic.w1);
    check(p.b1, analytic.b1);
    check(p.w2, analytic.w2);
    check(p.b2, analytic.b2);
    check(p.w3, analytic.w3);
    check(p.b3, analytic.b3);
    return worst;
}

}  // namespace oracle
