#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace skys3::ode {

enum class StepStatus {
    done,           // reached the requested endpoint
    halted,         // monitor requested a stop
    step_underflow, // required step below h_min (stiff or singular)
    max_steps,      // step budget exhausted
};

struct StepControl {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double h_min = 1e-14;
    double h_max = 0.05;
    double safety = 0.9;
    long max_steps = 1000000;
};

/// Embedded Dormand-Prince 5(4) pair with PI-free step control.  The state
/// dimension is a compile-time constant; the right-hand side is any callable
/// state = rhs(t, state).  Direction of integration follows sign(t1 - t0).
///
/// The monitor is called after every accepted step as monitor(t, y); when it
/// returns false the integration stops with StepStatus::halted at that point.
template <std::size_t N>
class DormandPrince5 {
public:
    using State = std::array<double, N>;

    explicit DormandPrince5(StepControl ctl = {}) : ctl_(ctl) {}

    template <class RHS, class Monitor>
    StepStatus integrate(RHS&& rhs, double t0, double t1, State& y, Monitor&& monitor) {
        const double dir = (t1 >= t0) ? 1.0 : -1.0;
        double t = t0;
        if (t == t1) return StepStatus::done;
        double h = dir * std::min(std::abs(h_), std::abs(t1 - t0));
        if (h == 0.0) h = dir * std::min(ctl_.h_max, std::abs(t1 - t0));
        long nsteps = 0;
        while (dir * (t1 - t) > 0.0) {
            if (++nsteps > ctl_.max_steps) return StepStatus::max_steps;
            if (std::abs(h) < ctl_.h_min) return StepStatus::step_underflow;
            bool clipped = false;
            if (dir * (t + h - t1) > 0.0) {
                h = t1 - t;
                clipped = true;
            }
            State y5;
            const double err = step(rhs, t, y, h, y5);
            if (!std::isfinite(err)) {
                h *= 0.25;
                continue;
            }
            if (err <= 1.0) {
                t = clipped ? t1 : t + h;
                y = y5;
                ++accepted_;
                if (!monitor(t, y)) return StepStatus::halted;
            }
            double factor = ctl_.safety * std::pow(std::max(err, 1e-10), -0.2);
            factor = std::clamp(factor, 0.2, 5.0);
            h *= factor;
            if (std::abs(h) > ctl_.h_max) h = dir * ctl_.h_max;
            if (!clipped || err > 1.0) h_ = h;
        }
        return StepStatus::done;
    }

    template <class RHS>
    StepStatus integrate(RHS&& rhs, double t0, double t1, State& y) {
        return integrate(rhs, t0, t1, y, [](double, const State&) { return true; });
    }

    /// Accepted steps since construction (diagnostic).
    long accepted_steps() const { return accepted_; }
    /// Reset the adaptive step memory (e.g. when switching trajectories).
    void reset(double h_init = 0.0) {
        h_ = (h_init != 0.0) ? h_init : 0.0;
        accepted_ = 0;
    }

private:
    // One trial step t -> t + h.  Returns the scaled error estimate
    // (<= 1 means accept) and fills y5 with the 5th-order result.
    template <class RHS>
    double step(RHS&& rhs, double t, const State& y, double h, State& y5) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        // Difference between the 5th- and the embedded 4th-order weights.
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const State k1 = rhs(t, y);
        State tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        const State k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] +
                     h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] +
                    h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State k7 = rhs(t + h, y5); // FSAL stage, used only for the error estimate

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double scale =
                ctl_.abs_tol + ctl_.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err += (e / scale) * (e / scale);
        }
        return std::sqrt(err / N);
    }

    StepControl ctl_;
    double h_ = 0.0;
    long accepted_ = 0;
};

} // namespace skys3::ode
