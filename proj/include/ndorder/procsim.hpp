#ifndef NDORDER_PROCSIM_HPP_
#define NDORDER_PROCSIM_HPP_

// Bulk-synchronous runtime of logical processes. Every rank runs the same
// program on its own thread and interacts with the others only through the
// collective exchange() superstep, so results do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/payload.hpp"

namespace ndorder {

enum class Schedule {
  parallel,    // ranks run concurrently
  sequential,  // one rank at a time
};

struct Message {
  int source = 0;
  int dest = 0;
  int tag = 0;
  Bytes payload;
};

class DeadlockError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

namespace detail {

struct GroupState;

class AbortedError : public std::runtime_error {
 public:
  AbortedError() : std::runtime_error("aborted: another rank failed") {}
};

struct RuntimeState {
  RuntimeState(int procs, Schedule sched) : schedule(sched), finished(procs) {
    for (auto& flag : finished) flag.store(false);
  }

  Schedule schedule;
  std::mutex token;  // held by the running rank under Schedule::sequential
  std::atomic<bool> aborted{false};
  std::atomic<bool> deadlocked{false};
  std::atomic<int> blocked{0};
  std::atomic<int> done{0};
  std::vector<std::atomic<bool>> finished;

  // Every live rank waits in some exchange: no group can ever complete.
  bool all_blocked() const {
    const int waiting = blocked.load();
    return waiting > 0 && waiting + done.load() == static_cast<int>(finished.size());
  }

  std::mutex registry_mutex;
  std::vector<std::shared_ptr<GroupState>> groups;

  void register_group(std::shared_ptr<GroupState> group) {
    std::lock_guard lock(registry_mutex);
    groups.push_back(std::move(group));
  }

  void wake_all();
};

struct PendingMessage {
  int seq;
  Message message;
};

struct GroupState {
  RuntimeState* runtime = nullptr;
  std::vector<int> members;  // world ranks, group rank = position
  std::uint64_t seed = 0;

  std::mutex mutex;
  std::condition_variable cv;
  int arrived = 0;
  std::uint64_t generation = 0;
  std::vector<std::vector<PendingMessage>> pending;
  std::vector<std::vector<Message>> ready;
  std::map<std::uint64_t, std::pair<std::shared_ptr<GroupState>, std::shared_ptr<GroupState>>> children;

  int size() const { return static_cast<int>(members.size()); }

  std::optional<int> finished_member() const {
    for (int r = 0; r < size(); ++r) {
      if (runtime->finished[members[r]].load()) return r;
    }
    return std::nullopt;
  }
};

inline void RuntimeState::wake_all() {
  std::vector<std::shared_ptr<GroupState>> snapshot;
  {
    std::lock_guard lock(registry_mutex);
    snapshot = groups;
  }
  for (auto& group : snapshot) {
    std::lock_guard lock(group->mutex);
    group->cv.notify_all();
  }
}

inline std::shared_ptr<GroupState> make_group(RuntimeState* runtime, std::vector<int> members,
                                              std::uint64_t seed) {
  auto group = std::make_shared<GroupState>();
  group->runtime = runtime;
  group->members = std::move(members);
  group->seed = seed;
  group->pending.resize(group->members.size());
  group->ready.resize(group->members.size());
  runtime->register_group(group);
  return group;
}

}  // namespace detail

/// One rank's handle on its current process group.
class Comm {
 public:
  Comm(std::shared_ptr<detail::GroupState> group, int rank)
      : group_(std::move(group)), rank_(rank), rng_(combine_seed(group_->seed, static_cast<std::uint64_t>(rank))) {}

  Comm(const Comm&) = delete;
  Comm& operator=(const Comm&) = delete;
  Comm(Comm&&) = default;
  Comm& operator=(Comm&&) = default;

  int rank() const { return rank_; }
  int size() const { return group_->size(); }
  int world_rank() const { return group_->members[rank_]; }
  std::uint64_t seed() const { return group_->seed; }
  Rng& rng() { return rng_; }
  std::uint64_t supersteps() const { return supersteps_; }

  /// Collective superstep. Every message sent by any rank of the group is
  /// delivered to its destination; incoming lists are sorted by (source, send order).
  std::vector<Message> exchange(std::vector<Message> outgoing) {
    for (auto& message : outgoing) {
      if (message.dest < 0 || message.dest >= size()) {
        throw InvariantError("exchange: destination rank " + std::to_string(message.dest) +
                             " outside group of size " + std::to_string(size()));
      }
      message.source = rank_;
    }
    auto& g = *group_;
    auto* runtime = g.runtime;
    const bool sequential = runtime->schedule == Schedule::sequential;
    if (sequential) runtime->token.unlock();
    std::vector<Message> incoming;
    std::exception_ptr failure;
    {
      std::unique_lock lock(g.mutex);
      int seq = 0;
      for (auto& message : outgoing) {
        g.pending[message.dest].push_back({seq++, std::move(message)});
      }
      const auto my_generation = g.generation;
      if (++g.arrived == g.size()) {
        for (int dest = 0; dest < g.size(); ++dest) {
          auto& box = g.pending[dest];
          std::stable_sort(box.begin(), box.end(), [](const auto& a, const auto& b) {
            return a.message.source < b.message.source;
          });
          g.ready[dest].clear();
          for (auto& entry : box) g.ready[dest].push_back(std::move(entry.message));
          box.clear();
        }
        runtime->blocked.fetch_sub(g.size() - 1);
        g.arrived = 0;
        ++g.generation;
        g.cv.notify_all();
      } else {
        runtime->blocked.fetch_add(1);
        if (runtime->all_blocked()) runtime->deadlocked.store(true);
        g.cv.wait(lock, [&] {
          return g.generation != my_generation || runtime->aborted.load() || runtime->deadlocked.load() ||
                 g.finished_member().has_value();
        });
      }
      if (g.generation != my_generation) {
        incoming = std::move(g.ready[rank_]);
        g.ready[rank_].clear();
      } else if (runtime->aborted.load()) {
        failure = std::make_exception_ptr(detail::AbortedError());
      } else if (auto gone = g.finished_member()) {
        failure = std::make_exception_ptr(DeadlockError(
            "deadlock: rank " + std::to_string(rank_) + " blocked in exchange of a group of size " +
            std::to_string(g.size()) + " after rank " + std::to_string(*gone) + " terminated"));
      } else {
        failure = std::make_exception_ptr(DeadlockError(
            "deadlock: every live rank is blocked in exchange with no message in flight (rank " +
            std::to_string(rank_) + ", group of size " + std::to_string(g.size()) + ")"));
      }
    }
    if (sequential) runtime->token.lock();
    if (failure) std::rethrow_exception(failure);
    ++supersteps_;
    return incoming;
  }

  /// Collective. Ranks [0, ceil(p/2)) form the first half, the rest the second.
  Comm split() {
    if (size() < 2) throw InvariantError("split: group of size 1 cannot be split");
    auto& g = *group_;
    const std::uint64_t index = split_count_++;
    const int first_size = (size() + 1) / 2;
    std::shared_ptr<detail::GroupState> child;
    {
      std::lock_guard lock(g.mutex);
      auto& entry = g.children[index];
      if (!entry.first) {
        const auto base = combine_seed(g.seed, index);
        std::vector<int> first(g.members.begin(), g.members.begin() + first_size);
        std::vector<int> second(g.members.begin() + first_size, g.members.end());
        entry.first = detail::make_group(g.runtime, std::move(first), combine_seed(base, 0));
        entry.second = detail::make_group(g.runtime, std::move(second), combine_seed(base, 1));
      }
      child = rank_ < first_size ? entry.first : entry.second;
    }
    return Comm(child, rank_ < first_size ? rank_ : rank_ - first_size);
  }

  static int first_half_size(int p) { return (p + 1) / 2; }
  bool in_first_half() const { return rank_ < first_half_size(size()); }

  // Collective helpers built on exchange().

  std::vector<Bytes> all_gather(const Bytes& mine) {
    std::vector<Message> outgoing;
    for (int r = 0; r < size(); ++r) outgoing.push_back({rank_, r, 0, mine});
    auto incoming = exchange(std::move(outgoing));
    std::vector<Bytes> result(size());
    for (auto& message : incoming) result[message.source] = std::move(message.payload);
    return result;
  }

  template <typename T>
  requires std::is_trivially_copyable_v<T>
  std::vector<T> all_gather_value(const T& value) {
    Packer packer;
    packer.put(value);
    auto gathered = all_gather(packer.take());
    std::vector<T> result;
    result.reserve(gathered.size());
    for (const auto& bytes : gathered) result.push_back(Unpacker(bytes).get<T>());
    return result;
  }

  Gnum all_reduce_sum(Gnum value) {
    Gnum total = 0;
    for (Gnum v : all_gather_value(value)) total += v;
    return total;
  }

  Gnum all_reduce_max(Gnum value) {
    auto values = all_gather_value(value);
    return *std::max_element(values.begin(), values.end());
  }

  Bytes broadcast(const Bytes& payload, int root) {
    std::vector<Message> outgoing;
    if (rank_ == root) {
      for (int r = 0; r < size(); ++r) outgoing.push_back({rank_, r, 0, payload});
    }
    auto incoming = exchange(std::move(outgoing));
    check_invariant(incoming.size() == 1, "broadcast: expected one message");
    return std::move(incoming.front().payload);
  }

 private:
  std::shared_ptr<detail::GroupState> group_;
  int rank_ = 0;
  Rng rng_;
  std::uint64_t split_count_ = 0;
  std::uint64_t supersteps_ = 0;
};

/// Runs `program(Comm&)` on `procs` logical processes and returns the
/// per-rank results. Rethrows the first genuine failure, lowest rank first.
template <typename Program>
auto run_group(int procs, std::uint64_t seed, Program&& program, Schedule schedule = Schedule::parallel)
    -> std::vector<std::invoke_result_t<Program&, Comm&>> {
  using Result = std::invoke_result_t<Program&, Comm&>;
  if (procs < 1) throw InputError("process count must be at least 1");

  detail::RuntimeState runtime(procs, schedule);
  std::vector<int> members(procs);
  for (int r = 0; r < procs; ++r) members[r] = r;
  auto root = detail::make_group(&runtime, std::move(members), seed);

  std::vector<std::optional<Result>> results(procs);
  std::vector<std::exception_ptr> failures(procs);
  auto body = [&](int rank) {
    if (schedule == Schedule::sequential) runtime.token.lock();
    try {
      Comm comm(root, rank);
      results[rank].emplace(program(comm));
    } catch (...) {
      failures[rank] = std::current_exception();
      runtime.aborted.store(true);
    }
    runtime.finished[rank].store(true);
    runtime.done.fetch_add(1);
    if (runtime.all_blocked()) runtime.deadlocked.store(true);
    if (schedule == Schedule::sequential) runtime.token.unlock();
    runtime.wake_all();
  };

  std::vector<std::thread> workers;
  workers.reserve(procs);
  for (int r = 0; r < procs; ++r) workers.emplace_back(body, r);
  for (auto& worker : workers) worker.join();

  std::exception_ptr aborted;
  for (int r = 0; r < procs; ++r) {
    if (!failures[r]) continue;
    try {
      std::rethrow_exception(failures[r]);
    } catch (const detail::AbortedError&) {
      aborted = failures[r];
    } catch (...) {
      throw;
    }
  }
  if (aborted) std::rethrow_exception(aborted);

  std::vector<Result> out;
  out.reserve(procs);
  for (auto& result : results) out.push_back(std::move(*result));
  return out;
}

}  // namespace ndorder

#endif  // NDORDER_PROCSIM_HPP_
