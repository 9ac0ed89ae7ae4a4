#pragma once

#include <map>
#include <mutex>
#include <utility>

namespace rankdeg::detail {

/// Thread-safe cache of a pure function. The lock is released while computing so that
/// nested caches may be consulted from inside `compute`.
template <class Key, class Value>
class Memo {
 public:
  template <class Compute>
  Value get(const Key& key, Compute&& compute) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    Value value = compute();
    std::lock_guard lock(mutex_);
    cache_.emplace(key, value);
    return value;
  }

 private:
  std::mutex mutex_;
  std::map<Key, Value> cache_;
};

}  // namespace rankdeg::detail
