#include "hqmm/any_model.hpp"

namespace hqmm {

namespace {
template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;
}  // namespace

std::string_view kind_name(const AnyModel& model) {
  return std::holds_alternative<Hqmm>(model) ? "hqmm" : "hmm";
}

Index alphabet_size(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.alphabet_size(); }, model);
}

double log_likelihood(const AnyModel& model, const ObservationSequence& seq, std::size_t burn_in) {
  return std::visit(Overloaded{
                        [&](const Hqmm& m) { return log_likelihood(m, seq, burn_in); },
                        [&](const Hmm& m) { return forward_log_likelihood(m, seq, burn_in); },
                    },
                    model);
}

ObservationSequence sample(const AnyModel& model, std::size_t length, std::uint64_t seed) {
  return std::visit(Overloaded{
                        [&](const Hqmm& m) { return sample(m, length, seed); },
                        [&](const Hmm& m) { return sample_hmm(m, length, seed); },
                    },
                    model);
}

}  // namespace hqmm
