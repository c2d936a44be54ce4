#pragma once

// Shared runs for the unit tests. Each is computed once per process.

#include "inflection/errors.hpp"
#include "inflection/evolve.hpp"
#include "inflection/searchlight.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace fixtures {

struct Run {
    inflection::evolve::RunResult result;
    std::vector<inflection::searchlight::SearchlightFrame> frames;  // every snapshot
    const inflection::searchlight::SearchlightFrame& at(double t) const {
        for (const auto& f : frames)
            if (f.t == t) return f;
        throw inflection::RangeError("fixture: no frame at requested time");
    }
    std::vector<inflection::searchlight::SearchlightFrame> pick(const std::vector<double>& ts) const {
        std::vector<inflection::searchlight::SearchlightFrame> out;
        for (double t : ts) out.push_back(at(t));
        return out;
    }
};

// Snapshots on the 0.25 lattice over [2, t_end].
inline const Run& reference(int j = 1, double dx = 0.01, double dt = 5e-4, double t_end = 6.0) {
    static std::map<std::tuple<int, double, double, double>, Run> cache;
    const auto key = std::make_tuple(j, dx, dt, t_end);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    inflection::evolve::RunParams p;
    p.dx = dx;
    p.dt = dt;
    p.t_end = t_end;
    for (double t = 2.0; t <= t_end + 1e-12; t += 0.25) p.snapshot_times.push_back(t);
    Run r;
    r.result = inflection::evolve::run(inflection::airy::mode(j), p);
    for (const auto& s : r.result.snapshots) r.frames.push_back(inflection::searchlight::to_searchlight(s));
    return cache.emplace(key, std::move(r)).first->second;
}

}  // namespace fixtures
