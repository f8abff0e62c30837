// Three-valued result of a condition check, with exact witnesses.
#pragma once

#include <string>
#include <vector>

#include "stab/rational.hpp"

namespace stab {

enum class VerdictValue { Holds, Fails, Inconclusive };

const char* verdict_name(VerdictValue v);

// Outcome of one certified check. Witness vectors are exact rationals whose
// meaning depends on the check (a direction, a multiplier, a pair of both).
// route names the decision path that produced the verdict so reports can be
// traced back to the rule that fired.
struct Verdict {
    VerdictValue value = VerdictValue::Inconclusive;
    std::string reason;
    std::string route;
    std::vector<QVec> witness;

    bool holds() const { return value == VerdictValue::Holds; }
    bool fails() const { return value == VerdictValue::Fails; }
    bool inconclusive() const { return value == VerdictValue::Inconclusive; }

    static Verdict make_holds(std::string reason = "", std::string route = "");
    static Verdict make_fails(std::string reason = "", std::string route = "");
    static Verdict make_inconclusive(std::string reason = "", std::string route = "");
    Verdict& with_witness(QVec w);
};

}  // namespace stab
