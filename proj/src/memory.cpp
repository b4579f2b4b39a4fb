#include "efd/memory.hpp"

#include <charconv>
#include <deque>
#include <mutex>

namespace efd {

namespace {

struct LabelTable {
  std::mutex mu;
  std::deque<std::string> names{""};
  std::unordered_map<std::string, std::uint32_t> ids{{"", 0}};
};

LabelTable& labels() {
  static LabelTable t;
  return t;
}

}  // namespace

Label::Label(std::string_view name) {
  auto& t = labels();
  std::lock_guard lock(t.mu);
  auto [it, fresh] = t.ids.try_emplace(std::string(name), static_cast<std::uint32_t>(t.names.size()));
  if (fresh) t.names.emplace_back(name);
  id_ = it->second;
}

const std::string& Label::name() const {
  auto& t = labels();
  std::lock_guard lock(t.mu);
  return t.names[id_];
}

std::string RegisterId::str() const {
  std::string out = name.name();
  if (index[0] < 0) return out;
  out += '[';
  for (int i = 0; i < 3 && index[i] >= 0; ++i) {
    if (i) out += '.';
    out += std::to_string(index[i]);
  }
  return out + ']';
}

RegisterId RegisterId::parse(std::string_view text) {
  auto open = text.find('[');
  RegisterId r(Label(text.substr(0, open)));
  if (open == std::string_view::npos) return r;
  if (text.back() != ']') throw std::invalid_argument("register parse: " + std::string(text));
  std::size_t pos = open + 1;
  for (int i = 0; i < 3; ++i) {
    std::int64_t x = 0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + text.size() - 1, x);
    if (ec != std::errc()) throw std::invalid_argument("register parse: " + std::string(text));
    r.index[i] = x;
    pos = static_cast<std::size_t>(p - text.data());
    if (pos == text.size() - 1) return r;
    if (text[pos] != '.') break;
    ++pos;
  }
  throw std::invalid_argument("register parse: " + std::string(text));
}

std::vector<RegisterId> MemoryStore::allocate(std::string_view name, std::size_t count, Value init) {
  Label l(name);
  if (families_.count(l.id())) throw MemoryError("duplicate allocation of " + std::string(name));
  std::vector<RegisterId> out;
  for (std::size_t i = 0; i < count; ++i) {
    RegisterId r(l, static_cast<std::int64_t>(i));
    if (cells_.count(r)) throw MemoryError("duplicate allocation of " + r.str());
    out.push_back(r);
  }
  for (const auto& r : out) cells_.emplace(r, init);
  log_.push_back({l, static_cast<std::int64_t>(count), std::move(init)});
  return out;
}

void MemoryStore::allocate_family(std::string_view name, Value init) {
  Label l(name);
  for (const auto& rec : log_) {
    if (rec.name == l) throw MemoryError("duplicate allocation of " + std::string(name));
  }
  families_.emplace(l.id(), init);
  log_.push_back({l, -1, std::move(init)});
}

const Value* MemoryStore::family_init(Label l) const {
  auto it = families_.find(l.id());
  return it == families_.end() ? nullptr : &it->second;
}

bool MemoryStore::is_allocated(const RegisterId& r) const {
  return cells_.count(r) || family_init(r.name);
}

const Value& MemoryStore::read(const RegisterId& r) const {
  auto it = cells_.find(r);
  if (it != cells_.end()) return it->second;
  if (const Value* init = family_init(r.name)) return *init;
  throw MemoryError("read of unallocated register " + r.str());
}

void MemoryStore::write(const RegisterId& r, Value v) {
  auto it = cells_.find(r);
  if (it != cells_.end()) {
    it->second = std::move(v);
    return;
  }
  if (!family_init(r.name)) throw MemoryError("write to unallocated register " + r.str());
  cells_.emplace(r, std::move(v));
}

std::vector<Value> MemoryStore::collect(const std::vector<RegisterId>& regs) const {
  std::vector<Value> out;
  out.reserve(regs.size());
  for (const auto& r : regs) out.push_back(read(r));
  return out;
}

}  // namespace efd
