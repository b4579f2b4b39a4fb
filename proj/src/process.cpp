#include "efd/process.hpp"

namespace efd {

void CoroutineProcess::start() {
  root_ = body();
  root_.handle().promise().driver = &driver_;
  driver_.leaf = root_.handle();
  resume(root_.handle());
}

void CoroutineProcess::advance(const Value& observation) {
  if (driver_.finished) return;
  driver_.observation = observation;
  resume(driver_.leaf);
}

void CoroutineProcess::resume(std::coroutine_handle<> h) {
  driver_.pending = Action::null();
  h.resume();
  if (driver_.finished) {
    driver_.pending = Action::null();
    if (auto e = root_.handle().promise().error) std::rethrow_exception(e);
  }
}

}  // namespace efd
