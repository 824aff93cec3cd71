#include "polybell/local_bound.hpp"

namespace polybell {

namespace {

// Odometer over all per-setting outcome choices of one party.
bool next_choice(std::vector<int>& choice, const std::vector<int>& outcomes) {
    for (size_t s = 0; s < choice.size(); ++s) {
        if (choice[s] < outcomes[s]) {
            ++choice[s];
            return true;
        }
        choice[s] = 1;
    }
    return false;
}

}  // namespace

LocalBound local_bound(const BellExpression& expr, Direction direction) {
    expr.validate();
    const Scenario& sc = expr.scenario;
    const double sign = direction == Direction::Max ? 1.0 : -1.0;

    LocalBound best{0.0, {}};
    bool first = true;

    std::vector<int> a(sc.a_settings(), 1);
    do {
        std::vector<int> b(sc.b_settings(), 1);
        do {
            const double v = evaluate_deterministic(expr, a, b);
            if (first || sign * v > sign * best.value) {
                best.value = v;
                best.witness = {a, b};
                first = false;
            }
        } while (next_choice(b, sc.b_outcomes));
    } while (next_choice(a, sc.a_outcomes));

    return best;
}

}  // namespace polybell
