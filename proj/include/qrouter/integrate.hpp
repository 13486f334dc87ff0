#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "qrouter/errors.hpp"
#include "qrouter/linalg.hpp"

namespace qrouter {

// Adaptive Dormand-Prince 5(4) on complex state vectors. FSAL is exploited
// across accepted steps and across successive integrate_to() segments, so
// driving the stepper to a dense ladder of sample times costs no extra
// right-hand-side evaluations.
class Dp5Stepper {
  public:
    using Rhs = std::function<void(double t, const CVector& y, CVector& dydt)>;

    struct Options {
        double rtol = 1e-8;
        double atol = 1e-10;
        double h_init = 1e-2;
        std::int64_t max_steps = 400000000;
    };

    struct Stats {
        std::int64_t steps = 0;
        std::int64_t rejected = 0;
        std::int64_t rhs_calls = 0;
    };

    Dp5Stepper(Rhs rhs, Options opt) : rhs_(std::move(rhs)), opt_(opt) {}

    const Stats& stats() const { return stats_; }

    // Advance y from t to t_target (t_target >= t).
    void integrate_to(CVector& y, double& t, double t_target) {
        if (t_target <= t) return;
        const Eigen::Index n = y.size();
        ensure_sized(n);
        if (!have_k1_) {
            rhs_(t, y, k_[0]);
            ++stats_.rhs_calls;
            have_k1_ = true;
        }
        if (h_ <= 0.0) h_ = opt_.h_init;
        const double h_floor = 1e-12 * std::max(1.0, t_target);
        while (t < t_target) {
            double h = std::min(h_, t_target - t);
            bool hit_end = (h >= t_target - t - h_floor);
            if (stats_.steps + stats_.rejected > opt_.max_steps)
                throw NonConvergence("integrator exceeded max step budget");
            // stages 2..6
            for (int s = 1; s < 6; ++s) {
                ytmp_ = y;
                for (int j = 0; j < s; ++j)
                    if (kA[s][j] != 0.0) ytmp_ += (h * kA[s][j]) * k_[j];
                rhs_(t + kC[s] * h, ytmp_, k_[s]);
                ++stats_.rhs_calls;
            }
            // 5th-order solution, then FSAL stage at (t + h, ynew)
            ynew_ = y;
            for (int j = 0; j < 6; ++j)
                if (kB[j] != 0.0) ynew_ += (h * kB[j]) * k_[j];
            rhs_(t + h, ynew_, k_[6]);
            ++stats_.rhs_calls;
            // embedded error estimate
            yerr_.setZero(n);
            for (int j = 0; j < 7; ++j)
                if (kE[j] != 0.0) yerr_ += (h * kE[j]) * k_[j];
            double err = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double sk = opt_.atol
                    + opt_.rtol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
                const double q = std::abs(yerr_[i]) / sk;
                err += q * q;
            }
            err = std::sqrt(err / double(n));
            if (!std::isfinite(err)) err = 1e10;
            if (err <= 1.0) {
                t = hit_end ? t_target : t + h;
                y.swap(ynew_);
                k_[0].swap(k_[6]);  // FSAL
                ++stats_.steps;
                if (!hit_end) {
                    // A step clipped to the segment end says nothing about the
                    // natural step size, so only unclipped steps update it.
                    double fac = kSafety * std::pow(err > 0 ? err : 1e-10, -kAlpha)
                                 * std::pow(err_old_, kBeta);
                    h_ = h * std::min(kFacMax, std::max(kFacMin, fac));
                    err_old_ = std::max(err, 1e-4);
                }
            } else {
                ++stats_.rejected;
                double fac = kSafety * std::pow(err, -0.2);
                h_ = h * std::max(kFacMin, std::min(1.0, fac));
                if (h_ < h_floor)
                    throw NonConvergence("integrator step size underflow");
            }
        }
    }

    // State mutated externally (e.g. resymmetrized): drop the FSAL cache.
    void invalidate_cache() { have_k1_ = false; }

  private:
    void ensure_sized(Eigen::Index n) {
        if (ytmp_.size() != n) {
            for (auto& k : k_) k.resize(n);
            ytmp_.resize(n);
            ynew_.resize(n);
            yerr_.resize(n);
        }
    }

    static constexpr double kSafety = 0.9;
    static constexpr double kAlpha = 0.7 / 5.0;  // PI controller (Gustafsson)
    static constexpr double kBeta = 0.4 / 5.0;
    static constexpr double kFacMin = 0.2;
    static constexpr double kFacMax = 5.0;

    static constexpr double kC[6] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0};
    static constexpr double kA[6][5] = {
        {0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656}};
    static constexpr double kB[6] = {35.0 / 384,     0.0,       500.0 / 1113,
                                     125.0 / 192,    -2187.0 / 6784, 11.0 / 84};
    static constexpr double kE[7] = {71.0 / 57600,   0.0,  -71.0 / 16695,
                                     71.0 / 1920,    -17253.0 / 339200,
                                     22.0 / 525,     -1.0 / 40};

    Rhs rhs_;
    Options opt_;
    Stats stats_;
    CVector k_[7], ytmp_, ynew_, yerr_;
    double h_ = 0.0;
    double err_old_ = 1e-4;
    bool have_k1_ = false;
};

}  // namespace qrouter
