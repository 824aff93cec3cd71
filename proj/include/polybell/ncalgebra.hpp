#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polybell/expression.hpp"
#include "polybell/local_bound.hpp"
#include "polybell/restriction.hpp"
#include "polybell/sdp_problem.hpp"
#include "polybell/sdp_solver.hpp"

namespace polybell {

// One measurement projector: for a setting with effective outcome support S
// the retained letters are S minus its largest label, which is eliminated by
// completeness.
struct Letter {
    Party party;
    int setting;
    int outcome;
    auto operator<=>(const Letter&) const = default;
};

// Word of letters in canonical form: A letters before B letters, adjacent
// repetitions collapsed. Words hitting orthogonality are the zero monomial.
struct Monomial {
    bool zero = false;
    std::vector<Letter> word;

    static Monomial identity() { return {}; }
    static Monomial zero_monomial() { return {true, {}}; }

    bool is_identity() const { return !zero && word.empty(); }
    int degree() const { return zero ? 0 : static_cast<int>(word.size()); }
    bool operator==(const Monomial&) const = default;

    std::string str() const;  // e.g. "A1.1 B2.3", "1", "0"
};

Monomial canonicalize(const std::vector<Letter>& word);
Monomial adjoint(const Monomial& m);
Monomial mono_mul(const Monomial& u, const Monomial& v);

// Hierarchy level: plain word-length levels "1", "2", "3", ... or "1+AB"
// (level one plus all cross products of one A and one B letter).
struct LevelSpec {
    int base = 2;
    bool plus_ab = false;

    static LevelSpec parse(const std::string& text);
    std::string str() const;
    bool operator==(const LevelSpec&) const = default;
};

// Identity plus all nonzero canonical monomials admitted by the level, in a
// deterministic order (by degree, A part first).
std::vector<Monomial> generate_monomials(const Scenario& scenario,
                                         const OutcomeRestriction& restriction,
                                         const LevelSpec& level);

// Moment-matrix relaxation of the expression: entry (u,v) holds the variable
// of the equivalence class of u^dag v, the identity cell is fixed to one and
// orthogonal words to zero; the objective expands eliminated outcomes through
// completeness over the restricted support.
struct MomentSdp {
    SdpProblem problem;
    std::vector<Monomial> basis;
    std::vector<Monomial> class_reps;             // one representative per variable
    std::map<std::string, int> class_index;       // canonical word key -> variable

    int index_of(const Monomial& m) const;        // -1 when the class is absent
};

MomentSdp build_moment_sdp(const BellExpression& expr,
                           const std::optional<OutcomeRestriction>& restriction,
                           const LevelSpec& level);

struct BoundOptions {
    double tol = 0.0;   // 0 = solver default for the matrix size
    int jobs = 0;       // 0 = available parallelism
    bool dedup = false; // orbit-reduce the restriction family first
};

struct RestrictedBoundItem {
    std::string restriction;
    double value;
    SolveStatus status;
    double gap;
};

struct RestrictedBound {
    double value;
    std::vector<RestrictedBoundItem> breakdown;
    size_t family_size = 0;  // before any dedup
};

// Optimum of the moment SDP over every restriction with n non-trivial
// outcomes per setting. Direction Min negates the expression.
RestrictedBound restricted_bound(const BellExpression& expr, int n,
                                 const LevelSpec& level, Direction direction,
                                 const BoundOptions& options = {});

}  // namespace polybell
