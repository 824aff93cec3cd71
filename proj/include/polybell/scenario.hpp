#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace polybell {

enum class Party { A, B };

// A bipartite measurement scenario: one outcome count per setting and party.
// Settings and outcome labels are 1-based throughout.
struct Scenario {
    std::vector<int> a_outcomes;
    std::vector<int> b_outcomes;

    int a_settings() const { return static_cast<int>(a_outcomes.size()); }
    int b_settings() const { return static_cast<int>(b_outcomes.size()); }

    int settings(Party p) const { return p == Party::A ? a_settings() : b_settings(); }

    int outcomes(Party p, int setting) const {
        const auto& v = (p == Party::A) ? a_outcomes : b_outcomes;
        if (setting < 1 || setting > static_cast<int>(v.size()))
            throw std::invalid_argument("setting index out of range");
        return v[setting - 1];
    }

    int max_outcomes() const {
        int m = 0;
        for (int r : a_outcomes) m = std::max(m, r);
        for (int r : b_outcomes) m = std::max(m, r);
        return m;
    }

    void validate() const {
        if (a_outcomes.empty() || b_outcomes.empty())
            throw std::invalid_argument("each party needs at least one setting");
        for (int r : a_outcomes)
            if (r < 1) throw std::invalid_argument("outcome count must be >= 1");
        for (int r : b_outcomes)
            if (r < 1) throw std::invalid_argument("outcome count must be >= 1");
    }

    bool operator==(const Scenario& o) const {
        return a_outcomes == o.a_outcomes && b_outcomes == o.b_outcomes;
    }
};

// Uniform scenario: `settings` settings per party, all with r outcomes.
inline Scenario uniform_scenario(int settings, int r) {
    Scenario s;
    s.a_outcomes.assign(settings, r);
    s.b_outcomes.assign(settings, r);
    s.validate();
    return s;
}

// Per-party, per-setting outcome label maps. Maps need not be injective:
// a many-to-one map merges outcomes. Entry [s-1][k-1] is the image of
// outcome k of setting s.
struct Relabeling {
    std::vector<std::vector<int>> a_maps;
    std::vector<std::vector<int>> b_maps;

    static Relabeling identity(const Scenario& sc) {
        Relabeling rl;
        for (int r : sc.a_outcomes) {
            std::vector<int> m(r);
            for (int k = 1; k <= r; ++k) m[k - 1] = k;
            rl.a_maps.push_back(std::move(m));
        }
        for (int r : sc.b_outcomes) {
            std::vector<int> m(r);
            for (int k = 1; k <= r; ++k) m[k - 1] = k;
            rl.b_maps.push_back(std::move(m));
        }
        return rl;
    }

    void validate(const Scenario& sc) const {
        auto check = [](const std::vector<std::vector<int>>& maps,
                        const std::vector<int>& outs) {
            if (maps.size() != outs.size())
                throw std::invalid_argument("relabeling must cover every setting");
            for (size_t s = 0; s < maps.size(); ++s) {
                if (static_cast<int>(maps[s].size()) != outs[s])
                    throw std::invalid_argument("relabeling map must cover labels 1..r");
                for (int v : maps[s])
                    if (v < 1) throw std::invalid_argument("relabeled outcome must be >= 1");
            }
        };
        check(a_maps, sc.a_outcomes);
        check(b_maps, sc.b_outcomes);
    }
};

}  // namespace polybell
