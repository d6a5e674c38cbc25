#include "mmab/orthogonalize.hpp"

#include <stdexcept>

#include "mmab/errors.hpp"

namespace mmab {

Orthogonalizer::Orthogonalizer(int num_ranks, std::uint64_t seed) : n_(num_ranks), rng_(seed) {
  if (num_ranks < 1) throw std::invalid_argument("Orthogonalizer: num_ranks must be >= 1");
}

ArmIndex Orthogonalizer::next_action() {
  if (done_) throw ProtocolError("Orthogonalizer: already finished");
  const auto wait_arm = static_cast<ArmIndex>(n_);
  if (offset_ == 0) {
    if (rank_ == 0) {
      pending_ = uniform_index(rng_, static_cast<std::size_t>(n_));
      return pending_;
    }
    return static_cast<ArmIndex>(rank_ - 1);
  }
  if (rank_ == 0 || offset_ == rank_) return wait_arm;
  return static_cast<ArmIndex>(rank_ - 1);
}

void Orthogonalizer::observe(bool shared) {
  ++slots_;
  if (offset_ == 0) {
    if (rank_ == 0 && !shared) rank_ = static_cast<int>(pending_) + 1;
    saw_sharing_ = false;
  } else if (shared) {
    saw_sharing_ = true;
  }
  if (++offset_ > n_) {
    offset_ = 0;
    if (!saw_sharing_ && rank_ != 0) done_ = true;
  }
}

}  // namespace mmab
