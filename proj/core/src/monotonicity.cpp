#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "fabflow/queueing.hpp"

namespace fabflow::queueing {

namespace {

constexpr double kKeyResolution = 1e-9;

std::string point_label(const WltpVector& p) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    if (i) out += ';';
    out += buf;
  }
  return out + ")";
}

// Slack for finite-difference noise when comparing neighbouring derivatives.
bool not_greater(double later, double earlier) {
  return later <= earlier + 1e-8 * std::max(1.0, std::abs(earlier));
}

struct Line {
  std::string label;
  std::vector<std::size_t> points;  // sorted by the varying coordinate
};

// Lines along which only free coordinate `vary` changes.
std::vector<Line> lines_varying(std::span<const WltpVector> grid, std::size_t vary) {
  std::map<std::vector<long long>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<long long> key;
    for (std::size_t j = 1; j < grid[k].size(); ++j) {
      if (j != vary) key.push_back(std::llround(grid[k][j] / kKeyResolution));
    }
    groups[key].push_back(k);
  }
  std::vector<Line> lines;
  for (auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return grid[a][vary] < grid[b][vary]; });
    std::string label = "vary=p" + std::to_string(vary);
    std::size_t slot = 0;
    for (std::size_t j = 1; j < grid[members.front()].size(); ++j) {
      if (j == vary) continue;
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.6g", static_cast<double>(key[slot++]) * kKeyResolution);
      label += ";p" + std::to_string(j) + "=" + buf;
    }
    lines.push_back({std::move(label), std::move(members)});
  }
  return lines;
}

}  // namespace

bool MonotonicityReport::all_pass(std::string_view claim) const {
  return std::all_of(results.begin(), results.end(),
                     [&](const ClaimResult& r) { return r.claim != claim || r.pass; });
}

std::size_t MonotonicityReport::count(std::string_view claim) const {
  return static_cast<std::size_t>(std::count_if(
      results.begin(), results.end(), [&](const ClaimResult& r) { return r.claim == claim; }));
}

std::optional<ClaimResult> MonotonicityReport::first_violation(std::string_view claim) const {
  for (const auto& r : results) {
    if (r.claim == claim && !r.pass) return r;
  }
  return std::nullopt;
}

MonotonicityReport check_monotonicity(const RoutingModel& model, std::span<const WltpVector> grid,
                                      const FleetConfig& c) {
  MonotonicityReport report;
  if (grid.empty()) return report;
  const std::size_t n = model.wltp_size() - 1;

  std::vector<std::vector<double>> grads;
  grads.reserve(grid.size());
  for (const auto& p : grid) grads.push_back(wip_gradient(model, p, c));

  for (std::size_t i = 1; i <= n; ++i) {
    ClaimResult positive{"positive_gradient", i,
                         "all_points(" + std::to_string(grid.size()) + ")", true, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!(grads[k][i - 1] > 0.0)) {
        positive.pass = false;
        if (!positive.violating_points.empty()) positive.violating_points += ' ';
        positive.violating_points += point_label(grid[k]);
      }
    }
    report.results.push_back(std::move(positive));

    // ∂W/∂p_i non-increasing as p_0 grows: p_0 grows when another free
    // coordinate shrinks. With a single free coordinate that is p_i itself.
    for (std::size_t j = 1; j <= n; ++j) {
      if (j == i && n > 1) continue;
      for (const auto& line : lines_varying(grid, j)) {
        ClaimResult r{"decreasing_in_p0", i, line.label, true, {}};
        // Walk in order of increasing p_0, i.e. decreasing p_j.
        for (std::size_t s = line.points.size() - 1; s > 0; --s) {
          const auto before = line.points[s];
          const auto after = line.points[s - 1];
          if (!not_greater(grads[after][i - 1], grads[before][i - 1])) {
            r.pass = false;
            r.violating_points = point_label(grid[before]) + "->" + point_label(grid[after]);
            break;
          }
        }
        report.results.push_back(std::move(r));
      }
    }

    for (const auto& line : lines_varying(grid, i)) {
      ClaimResult r{"increasing_in_pi", i, line.label, true, {}};
      for (std::size_t s = 1; s < line.points.size(); ++s) {
        const auto before = line.points[s - 1];
        const auto after = line.points[s];
        if (!not_greater(grads[before][i - 1], grads[after][i - 1])) {
          r.pass = false;
          r.violating_points = point_label(grid[before]) + "->" + point_label(grid[after]);
          break;
        }
      }
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

}  // namespace fabflow::queueing
