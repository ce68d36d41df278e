#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dstit/calculus.hpp"
#include "dstit/semantics.hpp"

namespace dstit {

struct ProofFile {
  int agents = 1;
  int choices = 0;
  std::optional<Formula> goal;  // when present, the root must be => w0 : goal
  Derivation proof;
};

struct ModelFile {
  DsModel model;
  std::optional<std::string> root;
};

// indent < 0 gives single-line output.
std::string proof_to_json(const ProofFile& pf, int indent = 1);
ProofFile proof_from_json(std::string_view text);

std::string model_to_json(const ModelFile& mf, int indent = 1);
ModelFile model_from_json(std::string_view text);

// Text forms used inside proof files.
RelAtom parse_rel_atom(std::string_view text, int agents);
Labelled parse_labelled(std::string_view text, int agents);

}  // namespace dstit
