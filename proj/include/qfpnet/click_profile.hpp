#ifndef QFPNET_CLICK_PROFILE_HPP
#define QFPNET_CLICK_PROFILE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "qfpnet/core.hpp"

namespace qfpnet {

enum class Condition { Equal, Different, ByRelationship };

// Per-pulse click probabilities for a set of detectors (numbered from 1).
struct ClickProfile {
    std::vector<int> detectors;
    std::vector<double> per_detector;
    Condition condition = Condition::ByRelationship;
    std::optional<Relationship> relationship;
    std::uint64_t pulses = 0;

    double at(int detector) const {
        const auto it = std::find(detectors.begin(), detectors.end(), detector);
        if (it == detectors.end()) throw DomainError("ClickProfile: detector not present");
        return per_detector[static_cast<std::size_t>(it - detectors.begin())];
    }

    // Restrict to a subset of detectors, keeping the given order.
    ClickProfile select(const std::vector<int>& which) const {
        ClickProfile out{{}, {}, condition, relationship, pulses};
        for (int d : which) {
            out.detectors.push_back(d);
            out.per_detector.push_back(at(d));
        }
        return out;
    }
};

// Equal / Different pair for the observed detectors of one run.
struct ConditionProfiles {
    ClickProfile equal;
    ClickProfile different;
};

}  // namespace qfpnet

#endif
