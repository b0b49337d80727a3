#include "rebuttal/types.hpp"

namespace rebuttal {

std::string Strategy::numbered() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + steps[i];
  }
  return out;
}

std::string RetrievalResult::evidence_text() const {
  std::string out;
  for (const auto& chunk : ranked) {
    if (!out.empty()) out += "\n\n";
    out += chunk.text;
  }
  return out;
}

}  // namespace rebuttal
