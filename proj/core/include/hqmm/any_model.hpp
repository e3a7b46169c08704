#pragma once

#include "hqmm/hmm.hpp"
#include "hqmm/model.hpp"

#include <string_view>
#include <variant>

namespace hqmm {

/// Either kind of sequence model; used wherever HQMMs and HMM baselines are
/// interchangeable (evaluation, classification, model files).
using AnyModel = std::variant<Hqmm, Hmm>;

std::string_view kind_name(const AnyModel& model);
Index alphabet_size(const AnyModel& model);
double log_likelihood(const AnyModel& model, const ObservationSequence& seq, std::size_t burn_in = 0);
ObservationSequence sample(const AnyModel& model, std::size_t length, std::uint64_t seed);

}  // namespace hqmm
