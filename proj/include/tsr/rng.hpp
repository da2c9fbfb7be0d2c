#pragma once

#include <cstdint>

// Counter-based splittable random streams.
//
// A stream is (id, counter). Draw n of a stream is a pure function of
// (id, n): the splitmix64 output function applied to id + (n+1)*GAMMA.
// Child streams are derived with derive(parent_id, index); the derivation
// is a documented pure function, so a trajectory is fully reproducible
// from its root seed and the branch indices taken along the way.

namespace tsr::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (Steele, Lea, Flood; public domain reference code).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives the stream id of child `index` of stream `parent`.
// Double mixing decorrelates siblings from each other and from the parent.
inline constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
    return mix64(mix64(parent + kGamma) ^ mix64(index * kGamma + 0x8D1B5FBD3F8E2A9CULL));
}

// Reserved branch indices for the top-level stream tree. Environments hang
// their layout and transition streams off the task seed; the trainer hangs
// training/validation task seeds off the root seed on distinct domains, so
// the two seed sets can never alias.
namespace domain {
inline constexpr std::uint64_t kLayout = 1;      // task_seed -> board/catalog generation
inline constexpr std::uint64_t kTransition = 2;  // task_seed -> env transition stream
inline constexpr std::uint64_t kAction = 3;      // task_seed -> policy sampling root
inline constexpr std::uint64_t kTrainTasks = 4;  // root_seed -> training task seeds
inline constexpr std::uint64_t kValTasks = 5;    // root_seed -> validation task seeds
inline constexpr std::uint64_t kShuffle = 6;     // root_seed -> minibatch shuffling
inline constexpr std::uint64_t kEval = 7;        // root_seed -> eval rollout streams
}  // namespace domain

class Stream {
  public:
    Stream() : id_(0), counter_(0) {}
    explicit Stream(std::uint64_t id) : id_(id), counter_(0) {}

    std::uint64_t id() const { return id_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() { return mix64(id_ + (++counter_) * kGamma); }

    // uniform in [0, 1), 53-bit mantissa
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n > 0; multiply-shift, bias < n / 2^64
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    Stream branch(std::uint64_t index) const { return Stream(derive(id_, index)); }

    bool operator==(const Stream&) const = default;

  private:
    std::uint64_t id_;
    std::uint64_t counter_;
};

}  // namespace tsr::rng
