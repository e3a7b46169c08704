#include "hqmm/error.hpp"

#include <sstream>

namespace hqmm {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string zero_probability_message(std::size_t step, std::size_t symbol, double p,
                                     std::size_t sequence, const std::string& context) {
  std::ostringstream os;
  if (!context.empty()) os << context << ": ";
  os << "observation has zero probability: symbol " << symbol << " at step " << step;
  if (sequence != ZeroProbabilityError::kNoSequence) os << " of sequence " << sequence;
  os << " (p = " << p << ")";
  return os.str();
}

}  // namespace

ZeroProbabilityError::ZeroProbabilityError(std::size_t step, std::size_t symbol, double probability,
                                           std::size_t sequence, std::string context)
    : Error(zero_probability_message(step, symbol, probability, sequence, context)),
      step_(step),
      symbol_(symbol),
      probability_(probability),
      sequence_(sequence),
      context_(std::move(context)) {}

}  // namespace hqmm
