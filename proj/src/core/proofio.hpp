#pragma once

#include "logic.hpp"

namespace relat {

// JSON proof documents. Serialization is deterministic; parsing rejects
// malformed documents with std::invalid_argument and round-trips exactly
// (proofFromJson(proofToJson(p)) == p node by node).
std::string proofToJson(const LProof& p);
LProof proofFromJson(const std::string& text);

}  // namespace relat
