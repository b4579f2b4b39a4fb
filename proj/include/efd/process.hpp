#pragma once

#include <coroutine>
#include <exception>
#include <memory>
#include <optional>
#include <utility>

#include "efd/action.hpp"

namespace efd {

// A running process as the executor sees it: one pending action at a time.
class Process {
 public:
  virtual ~Process() = default;
  // Called once before the first step.
  virtual void start() = 0;
  virtual const Action& pending() const = 0;
  // Reports the observation of the pending action and moves to the next one.
  virtual void advance(const Value& observation) = 0;
};

using ProcessPtr = std::unique_ptr<Process>;

class AutomatonProcess final : public Process {
 public:
  AutomatonProcess(AutomatonPtr a, Value input) : a_(std::move(a)), input_(std::move(input)) {}

  void start() override {
    state_ = a_->init(input_);
    step({});
  }
  const Action& pending() const override { return pending_; }
  void advance(const Value& observation) override { step(observation); }
  const Value& state() const { return state_; }

 private:
  void step(const Value& obs) {
    Transition t = a_->resume(state_, obs);
    pending_ = std::move(t.action);
    state_ = std::move(t.state);
  }

  AutomatonPtr a_;
  Value input_;
  Value state_;
  Action pending_;
};

// Coroutine support for protocols that are only ever run by the executor (never
// copied into another simulation). `co_await co::read(r)` yields one step.
namespace co {

struct Driver {
  Action pending;
  Value observation;
  std::coroutine_handle<> leaf;
  bool finished = false;
};

struct PromiseBase {
  Driver* driver = nullptr;
  std::coroutine_handle<> continuation;
  std::exception_ptr error;

  std::suspend_always initial_suspend() noexcept { return {}; }

  struct FinalAwaiter {
    bool await_ready() noexcept { return false; }
    template <class P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept {
      auto& p = h.promise();
      if (p.continuation) {
        p.driver->leaf = p.continuation;
        return p.continuation;
      }
      p.driver->finished = true;
      return std::noop_coroutine();
    }
    void await_resume() noexcept {}
  };
  FinalAwaiter final_suspend() noexcept { return {}; }
  void unhandled_exception() { error = std::current_exception(); }
};

template <class T>
struct ValuePromise : PromiseBase {
  std::optional<T> value;
  void return_value(T v) { value = std::move(v); }
  T take() { return std::move(*value); }
};

template <>
struct ValuePromise<void> : PromiseBase {
  void return_void() {}
  void take() {}
};

template <class T = void>
class [[nodiscard]] Task {
 public:
  struct promise_type : ValuePromise<T> {
    Task get_return_object() {
      return Task(std::coroutine_handle<promise_type>::from_promise(*this));
    }
  };
  using Handle = std::coroutine_handle<promise_type>;

  Task() = default;
  explicit Task(Handle h) : h_(h) {}
  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&& o) noexcept {
    if (this != &o) {
      if (h_) h_.destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  ~Task() {
    if (h_) h_.destroy();
  }

  Handle handle() const { return h_; }

  struct Awaiter {
    Handle h;
    bool await_ready() noexcept { return false; }
    template <class P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> parent) noexcept {
      h.promise().driver = parent.promise().driver;
      h.promise().continuation = parent;
      h.promise().driver->leaf = h;
      return h;
    }
    T await_resume() {
      if (h.promise().error) std::rethrow_exception(h.promise().error);
      return h.promise().take();
    }
  };
  Awaiter operator co_await() && noexcept { return Awaiter{h_}; }

 private:
  Handle h_;
};

struct Op {
  Action action;
  Driver* d = nullptr;
  bool await_ready() const noexcept { return false; }
  template <class P>
  void await_suspend(std::coroutine_handle<P> h) noexcept {
    d = h.promise().driver;
    d->pending = std::move(action);
    d->leaf = h;
  }
  Value await_resume() { return std::move(d->observation); }
};

inline Op emit(Action a) { return Op{std::move(a)}; }
inline Op read(RegisterId r) { return Op{Action::read(r)}; }
inline Op write(RegisterId r, Value v) { return Op{Action::write(r, std::move(v))}; }
inline Op query() { return Op{Action::query()}; }
inline Op decide(Value v) { return Op{Action::decide(std::move(v))}; }
inline Op idle() { return Op{Action::null()}; }

}  // namespace co

// Base for coroutine-driven processes; subclasses implement body().
class CoroutineProcess : public Process {
 public:
  void start() override;
  const Action& pending() const override { return driver_.pending; }
  void advance(const Value& observation) override;
  bool finished() const { return driver_.finished; }

 protected:
  virtual co::Task<> body() = 0;

 private:
  void resume(std::coroutine_handle<> h);

  co::Driver driver_;
  co::Task<> root_;
};

}  // namespace efd
