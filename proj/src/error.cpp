#include "athn/error.hpp"

namespace athn {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::missing_pair: return "MissingPair";
    case Errc::empty_input: return "EmptyInput";
    case Errc::fewer_than_two_hubs: return "FewerThanTwoHubs";
    case Errc::unmapped_hub: return "UnmappedHub";
    case Errc::inconsistent_fixing: return "InconsistentFixing";
    case Errc::limit_reached: return "LimitReached";
    case Errc::invariant_violation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace athn
