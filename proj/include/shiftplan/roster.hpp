#pragma once

// Assignment of a shift plan to individual drivers.
//
// greedy_assign walks the start times in order and hands each shift to a
// driver whose previous extended shift has ended. The result respects every
// break but may give some drivers more than s shifts. rebalance then moves
// shifts between the busiest and the idlest driver along alternating paths of
// the overlap graph until every driver has exactly s shifts.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shiftplan/domain.hpp"

namespace shiftplan {

/// A shift plus its trailing break as the half-open interval [start, end).
struct ExtendedShift {
  int start = 0;
  int end = 0;

  bool operator==(const ExtendedShift&) const = default;
  auto operator<=>(const ExtendedShift&) const = default;
};

inline bool overlap(const ExtendedShift& a, const ExtendedShift& b) { return a.start < b.end && b.start < a.end; }

/// Per-driver shifts, each list sorted by start.
struct Roster {
  std::vector<std::vector<ExtendedShift>> drivers;

  long total_shifts() const {
    long n = 0;
    for (const auto& d : drivers) n += static_cast<long>(d.size());
    return n;
  }
};

class RosterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ExtendedShift extended_shift(int start, const Scenario& sc) {
  return {start, start + sc.shift_length + sc.min_break};
}

inline Roster greedy_assign(const ShiftPlan& plan, const Scenario& sc) {
  if (sc.boundary != Boundary::ZeroPadded)
    throw std::invalid_argument("greedy_assign: only zero-padded (non-wrapping) plans can be rostered");
  if (plan.starts.size() != static_cast<std::size_t>(sc.horizon))
    throw std::invalid_argument("greedy_assign: plan length differs from T");

  const auto n = static_cast<std::size_t>(sc.drivers);
  Roster roster;
  roster.drivers.resize(n);
  std::vector<int> free_from(n, 0);
  for (int t = 1; t <= sc.horizon; ++t) {
    const int count = plan.starts[static_cast<std::size_t>(t - 1)];
    if (count < 0) throw std::invalid_argument("greedy_assign: negative shift count");
    for (int k = 0; k < count; ++k) {
      std::size_t pick = n;
      for (std::size_t d = 0; d < n; ++d) {
        if (free_from[d] > t) continue;
        if (pick == n || roster.drivers[d].size() < roster.drivers[pick].size()) pick = d;
      }
      if (pick == n)
        throw RosterError("greedy_assign: no driver available for a shift starting at step " + std::to_string(t) +
                          " (the plan exceeds N active extended shifts)");
      const ExtendedShift shift = extended_shift(t, sc);
      roster.drivers[pick].push_back(shift);
      free_from[pick] = shift.end;
    }
  }
  return roster;
}

/// Sum over drivers of |shifts - s|.
inline long imbalance(const Roster& roster, int s) {
  long sum = 0;
  for (const auto& d : roster.drivers) sum += std::abs(static_cast<long>(d.size()) - s);
  return sum;
}

struct SwapRecord {
  int busy_driver = 0;   // had more than s shifts
  int idle_driver = 0;   // had fewer than s shifts
  int moved_to_idle = 0;
  int moved_to_busy = 0;
  long imbalance_before = 0;
  long imbalance_after = 0;
};

namespace detail {

struct SwapComponent {
  std::vector<int> nodes;
  int from_busy = 0;
  int from_idle = 0;
  int edges = 0;
  int earliest_start = 0;
  bool bipartite = true;
};

}  // namespace detail

inline Roster rebalance(Roster roster, int s, const std::function<void(const SwapRecord&)>& on_swap = {}) {
  if (s < 1) throw std::invalid_argument("rebalance: s must be >= 1");
  const auto n = roster.drivers.size();
  if (roster.total_shifts() != static_cast<long>(s) * static_cast<long>(n))
    throw std::invalid_argument("rebalance: roster holds " + std::to_string(roster.total_shifts()) +
                                " shifts, expected s*N = " + std::to_string(static_cast<long>(s) * static_cast<long>(n)));
  for (auto& d : roster.drivers) std::sort(d.begin(), d.end());

  for (;;) {
    std::size_t busy = 0, idle = 0;
    for (std::size_t d = 1; d < n; ++d) {
      if (roster.drivers[d].size() > roster.drivers[busy].size()) busy = d;
      if (roster.drivers[d].size() < roster.drivers[idle].size()) idle = d;
    }
    if (n == 0 || roster.drivers[busy].size() == static_cast<std::size_t>(s)) return roster;

    // Nodes 0..b-1 are the busy driver's shifts, b.. the idle driver's.
    const auto& busy_shifts = roster.drivers[busy];
    const auto& idle_shifts = roster.drivers[idle];
    const int b = static_cast<int>(busy_shifts.size());
    const int total = b + static_cast<int>(idle_shifts.size());
    auto shift_of = [&](int v) -> const ExtendedShift& {
      return v < b ? busy_shifts[static_cast<std::size_t>(v)] : idle_shifts[static_cast<std::size_t>(v - b)];
    };
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
    for (int u = 0; u < total; ++u)
      for (int v = u + 1; v < total; ++v) {
        if (!overlap(shift_of(u), shift_of(v))) continue;
        if ((u < b) == (v < b))
          throw RosterError("rebalance: driver " + std::to_string(u < b ? busy : idle) +
                            " holds overlapping shifts starting at " + std::to_string(shift_of(u).start) + " and " +
                            std::to_string(shift_of(v).start));
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
      }
    for (int u = 0; u < total; ++u)
      if (adj[static_cast<std::size_t>(u)].size() > 2)
        throw RosterError("rebalance: shift starting at " + std::to_string(shift_of(u).start) + " overlaps " +
                          std::to_string(adj[static_cast<std::size_t>(u)].size()) +
                          " shifts of the other driver; extended shifts must share one length");

    std::vector<int> side(static_cast<std::size_t>(total), -1);
    const detail::SwapComponent* chosen = nullptr;
    std::vector<detail::SwapComponent> components;
    for (int root = 0; root < total; ++root) {
      if (side[static_cast<std::size_t>(root)] >= 0) continue;
      detail::SwapComponent comp;
      comp.earliest_start = shift_of(root).start;
      std::queue<int> queue;
      queue.push(root);
      side[static_cast<std::size_t>(root)] = 0;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop();
        comp.nodes.push_back(u);
        (u < b ? comp.from_busy : comp.from_idle) += 1;
        comp.earliest_start = std::min(comp.earliest_start, shift_of(u).start);
        for (int v : adj[static_cast<std::size_t>(u)]) {
          ++comp.edges;
          if (side[static_cast<std::size_t>(v)] < 0) {
            side[static_cast<std::size_t>(v)] = 1 - side[static_cast<std::size_t>(u)];
            queue.push(v);
          } else if (side[static_cast<std::size_t>(v)] == side[static_cast<std::size_t>(u)]) {
            comp.bipartite = false;
          }
        }
      }
      comp.edges /= 2;
      if (!comp.bipartite) throw RosterError("rebalance: overlap graph has an odd cycle");
      components.push_back(std::move(comp));
    }
    for (const auto& comp : components) {
      const bool path = comp.edges + 1 == static_cast<int>(comp.nodes.size());
      if (path && comp.from_busy - comp.from_idle == 1 &&
          (chosen == nullptr || comp.earliest_start < chosen->earliest_start))
        chosen = &comp;
    }
    if (chosen == nullptr)
      throw RosterError("rebalance: no alternating path moves a shift from driver " + std::to_string(busy) +
                        " to driver " + std::to_string(idle));

    SwapRecord record{static_cast<int>(busy), static_cast<int>(idle), chosen->from_busy, chosen->from_idle,
                      imbalance(roster, s), 0};
    std::vector<char> in_path(static_cast<std::size_t>(total), 0);
    for (int v : chosen->nodes) in_path[static_cast<std::size_t>(v)] = 1;
    std::vector<ExtendedShift> new_busy, new_idle;
    for (int v = 0; v < total; ++v) {
      const bool from_busy = v < b;
      const bool moves = in_path[static_cast<std::size_t>(v)] != 0;
      (from_busy != moves ? new_busy : new_idle).push_back(shift_of(v));
    }
    std::sort(new_busy.begin(), new_busy.end());
    std::sort(new_idle.begin(), new_idle.end());
    roster.drivers[busy] = std::move(new_busy);
    roster.drivers[idle] = std::move(new_idle);
    record.imbalance_after = imbalance(roster, s);
    if (record.imbalance_before - record.imbalance_after != 2)
      throw std::logic_error("rebalance: swap changed the imbalance by " +
                             std::to_string(record.imbalance_before - record.imbalance_after) + " instead of 2");
    if (on_swap) on_swap(record);
  }
}

/// greedy_assign followed by rebalance.
inline Roster build_roster(const ShiftPlan& plan, const Scenario& sc,
                           const std::function<void(const SwapRecord&)>& on_swap = {}) {
  return rebalance(greedy_assign(plan, sc), sc.shifts_per_driver, on_swap);
}

enum class ViolationKind {
  StartMismatch,   ///< starts differ from the plan
  Overlap,         ///< one driver's extended shifts intersect
  ShiftCount,      ///< a driver does not work exactly s shifts
  DriverCount,     ///< more drivers than N
  IntervalLength,  ///< an interval is not shift plus break long
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::StartMismatch: return "start_mismatch";
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::ShiftCount: return "shift_count";
    case ViolationKind::DriverCount: return "driver_count";
    case ViolationKind::IntervalLength: return "interval_length";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  int driver = -1;  // -1 when not tied to one driver
  std::string detail;
};

struct RosterReport {
  bool ok = true;
  std::vector<Violation> violations;
};

inline RosterReport verify_roster(const Roster& roster, const ShiftPlan& plan, const Scenario& sc) {
  RosterReport report;
  auto add = [&](ViolationKind kind, int driver, std::string detail) {
    report.ok = false;
    report.violations.push_back({kind, driver, std::move(detail)});
  };

  if (roster.drivers.size() > static_cast<std::size_t>(std::max(sc.drivers, 0)))
    add(ViolationKind::DriverCount, -1,
        std::to_string(roster.drivers.size()) + " drivers, at most " + std::to_string(sc.drivers) + " allowed");

  std::map<int, long> rostered, planned;
  for (std::size_t t = 0; t < plan.starts.size(); ++t)
    if (plan.starts[t] != 0) planned[static_cast<int>(t) + 1] += plan.starts[t];
  const int span = sc.shift_length + sc.min_break;
  for (std::size_t d = 0; d < roster.drivers.size(); ++d) {
    const auto& shifts = roster.drivers[d];
    const int driver = static_cast<int>(d);
    if (shifts.size() != static_cast<std::size_t>(sc.shifts_per_driver))
      add(ViolationKind::ShiftCount, driver,
          std::to_string(shifts.size()) + " shifts, expected " + std::to_string(sc.shifts_per_driver));
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      ++rostered[shifts[i].start];
      if (shifts[i].end - shifts[i].start != span)
        add(ViolationKind::IntervalLength, driver,
            "interval [" + std::to_string(shifts[i].start) + ", " + std::to_string(shifts[i].end) + ") is not " +
                std::to_string(span) + " steps long");
      for (std::size_t k = i + 1; k < shifts.size(); ++k)
        if (overlap(shifts[i], shifts[k]))
          add(ViolationKind::Overlap, driver,
              "shifts starting at " + std::to_string(shifts[i].start) + " and " + std::to_string(shifts[k].start) +
                  " leave less than the minimum break");
    }
  }
  if (rostered != planned) {
    std::string detail;
    for (const auto& [t, c] : planned)
      if (auto it = rostered.find(t); it == rostered.end() || it->second != c)
        detail += " step " + std::to_string(t) + ": plan " + std::to_string(c) + ", roster " +
                  std::to_string(it == rostered.end() ? 0 : it->second) + ";";
    for (const auto& [t, c] : rostered)
      if (planned.find(t) == planned.end())
        detail += " step " + std::to_string(t) + ": plan 0, roster " + std::to_string(c) + ";";
    add(ViolationKind::StartMismatch, -1, "starts differ from the plan:" + detail);
  }
  return report;
}

}  // namespace shiftplan
