#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "emvl/model.hpp"

namespace emvl {

/// One row per sweep: energy after the sweep, the control value (p_s or T) used
/// during it, and the best energy seen so far.
struct TraceRow {
    std::size_t t = 0;
    Energy energy = 0;
    double control = 0.0;
    Energy best = 0;
};

struct RunResult {
    SpinState final_state;
    SpinState best_state;
    Energy final_energy = 0;
    Energy best_energy = 0;
    std::size_t iterations = 0;
    std::vector<TraceRow> trace;
};

struct RunOptions {
    bool trace = false;
    /// Keep a copy of the best configuration. Off for equilibrium sampling, where only energies matter.
    bool track_best_state = true;
};

/// Passed to per-update observers after every single-spin decision.
struct UpdateEvent {
    std::size_t t;            // sweep index
    std::size_t step;         // position within the sweep, 0..n-1
    std::size_t spin;
    Energy energy_before;
    Energy energy_after;
    const SpinState& state;   // state after the update
    std::span<const Energy> cached_fields = {};  // engines with a local-field cache expose it here
};

struct NoObserver {
    void operator()(const UpdateEvent&) const noexcept {}
};

/// Writes `t,energy,<control_name>` rows.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace,
                            std::string_view control_name) {
    os << "t,energy," << control_name << '\n';
    const auto old_prec = os.precision(17);
    for (const auto& r : trace) os << r.t << ',' << r.energy << ',' << r.control << '\n';
    os.precision(old_prec);
}

namespace detail {

/// Best-so-far bookkeeping shared by every engine.
struct BestTracker {
    Energy best;
    SpinState best_state;
    bool keep_state;

    BestTracker(Energy e, const SpinState& s, bool keep) : best(e), keep_state(keep) {
        if (keep) best_state = s;
    }

    void offer(Energy e, const SpinState& s) {
        if (e < best) {
            best = e;
            if (keep_state) best_state = s;
        }
    }
};

}  // namespace detail

}  // namespace emvl
