#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace anisoflow {

struct SelftestItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<SelftestItem> items;

    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return !items.empty();
    }
};

/// Adjointness of grad/div, exactness of the energy gradients, the zero fixed
/// point, the anisotropy assumptions and the energy inequality on a short run.
SelftestReport run_selftest(std::uint64_t seed = 2024);

}  // namespace anisoflow
