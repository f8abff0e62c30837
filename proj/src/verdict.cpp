#include "stab/verdict.hpp"

namespace stab {

const char* verdict_name(VerdictValue v) {
    switch (v) {
        case VerdictValue::Holds: return "Holds";
        case VerdictValue::Fails: return "Fails";
        case VerdictValue::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Verdict Verdict::make_holds(std::string reason, std::string route) {
    return Verdict{VerdictValue::Holds, std::move(reason), std::move(route), {}};
}

Verdict Verdict::make_fails(std::string reason, std::string route) {
    return Verdict{VerdictValue::Fails, std::move(reason), std::move(route), {}};
}

Verdict Verdict::make_inconclusive(std::string reason, std::string route) {
    return Verdict{VerdictValue::Inconclusive, std::move(reason), std::move(route), {}};
}

Verdict& Verdict::with_witness(QVec w) {
    witness.push_back(std::move(w));
    return *this;
}

}  // namespace stab
