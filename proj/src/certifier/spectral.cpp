#include "flawkit/certifier.hpp"
#include "flawkit/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace flawkit {

SubmatrixView::SubmatrixView(const StateIndex& index, const Strategy& strategy) {
    if (strategy.kind() != Strategy::Kind::fixed_permutation)
        throw ConfigError("the transition submatrix needs a fixed-permutation strategy");
    std::vector<std::int64_t> position(index.size(), -1);
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index.flawless(k)) continue;
        position[k] = static_cast<std::int64_t>(flawed_.size());
        flawed_.push_back(k);
    }
    theta_.assign(flawed_.size(), 0);
    for (std::size_t k = 0; k < index.initial_support().size(); ++k) {
        const auto p = position[index.initial_support()[k]];
        if (p >= 0) theta_[static_cast<std::size_t>(p)] += index.initial_probability()[k];
    }
    rows_.resize(flawed_.size());
    for (std::size_t r = 0; r < flawed_.size(); ++r) {
        const std::size_t k = flawed_[r];
        const FlawId i = strategy.choose(index.present(k));
        for (const auto& t : index.transitions(k, i)) {
            const auto c = position[t.to];
            if (c >= 0) rows_[r].push_back({static_cast<std::uint32_t>(c), t.probability});
        }
    }
}

std::vector<double> SubmatrixView::step(const std::vector<double>& x) const {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (x[r] == 0) continue;
        for (const auto& e : rows_[r]) y[e.col] += x[r] * e.value;
    }
    return y;
}

std::vector<double> SubmatrixView::survival(std::size_t horizon) const {
    std::vector<double> out;
    out.reserve(horizon + 1);
    std::vector<double> x = theta_;
    for (std::size_t t = 0;; ++t) {
        double s = 0;
        for (double v : x) s += v;
        out.push_back(s);
        if (t == horizon) break;
        x = step(x);
    }
    return out;
}

SpectralReport spectral_analyze(const StateIndex& index, const Strategy& strategy, std::size_t horizon,
                                const SpectralOptions& options) {
    SubmatrixView view(index, strategy);
    SpectralReport r;
    r.survival = view.survival(horizon);
    const std::size_t n = view.size();
    if (n == 0) {
        r.converged = true;
        r.method = "empty";
        return r;
    }

    // Power iteration on the row-vector action of Â + I: the shift keeps the iterate positive and
    // removes periodicity. Collatz–Wielandt ratios bracket the Perron root after every step.
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    for (r.iterations = 1; r.iterations <= options.max_iterations; ++r.iterations) {
        std::vector<double> y = view.step(x);
        double lo = std::numeric_limits<double>::infinity(), hi = 0, norm = 0;
        for (std::size_t k = 0; k < n; ++k) {
            y[k] += x[k];
            const double ratio = y[k] / x[k];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            norm += y[k];
        }
        r.lower = std::max(0.0, lo - 1);
        r.upper = hi - 1;
        for (auto& v : y) v /= norm;
        x = std::move(y);
        if (r.upper - r.lower <= options.tolerance * std::max(r.upper, 1e-300) || r.upper <= 0) {
            r.converged = true;
            break;
        }
    }
    r.iterations = std::min(r.iterations, options.max_iterations);
    r.rho = (r.lower + r.upper) / 2;
    r.method = "shifted power iteration";

    if (!r.converged && n <= options.dense_fallback_limit) {
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
            for (const auto& e : view.rows()[k]) dense(static_cast<Eigen::Index>(k), e.col) += e.value;
        const Eigen::VectorXcd eig = dense.eigenvalues();
        double rho = 0;
        for (Eigen::Index k = 0; k < eig.size(); ++k) rho = std::max(rho, std::abs(eig[k]));
        r.rho = rho;
        r.method = "dense eigenvalues";
        r.converged = true;
    }
    return r;
}

} // namespace flawkit
