#include "efd/value.hpp"

#include <charconv>
#include <cstdio>

namespace efd {

std::string to_string(ProcessId p) {
  return (p.role == Role::C ? "p" : "q") + std::to_string(p.index);
}

Hasher& Hasher::add_str(std::string_view s) {
  add(s.size());
  std::uint64_t chunk = 0;
  int n = 0;
  for (unsigned char c : s) {
    chunk = (chunk << 8) | c;
    if (++n == 8) {
      add(chunk);
      chunk = 0;
      n = 0;
    }
  }
  if (n) add(chunk);
  return *this;
}

Value Value::tuple(Tuple items) {
  Value v;
  v.v_ = std::make_shared<const Tuple>(std::move(items));
  return v;
}

Value Value::blob(std::shared_ptr<const Blob> b) {
  Value v;
  v.v_ = std::move(b);
  return v;
}

std::int64_t Value::as_int() const {
  if (!is_int()) throw TypeError("expected int, got " + str());
  return std::get<1>(v_);
}

ProcessId Value::as_pid() const {
  if (!is_pid()) throw TypeError("expected process id, got " + str());
  return std::get<2>(v_);
}

const Value::Tuple& Value::as_tuple() const {
  if (!is_tuple()) throw TypeError("expected tuple, got " + str());
  return *std::get<3>(v_);
}

const Blob& Value::as_blob() const {
  if (!is_blob()) throw TypeError("expected blob, got " + str());
  return *std::get<4>(v_);
}

const std::shared_ptr<const Blob>& Value::blob_ptr() const {
  if (!is_blob()) throw TypeError("expected blob, got " + str());
  return std::get<4>(v_);
}

void hash_value(Hasher& h, const Value& v) {
  if (v.is_bottom()) {
    h.add(0);
  } else if (v.is_int()) {
    h.add(1).add(static_cast<std::uint64_t>(v.as_int()));
  } else if (v.is_pid()) {
    auto p = v.as_pid();
    h.add(2).add(static_cast<std::uint64_t>(p.role)).add(static_cast<std::uint64_t>(p.index));
  } else if (v.is_tuple()) {
    h.add(3);
    hash_values(h, v.as_tuple());
  } else {
    h.add(4).add(v.as_blob().digest());
  }
}

std::uint64_t Value::digest() const {
  Hasher h;
  hash_value(h, *this);
  return h.value();
}

std::string Value::str() const {
  switch (v_.index()) {
    case 0:
      return "_";
    case 1:
      return std::to_string(std::get<1>(v_));
    case 2:
      return to_string(std::get<2>(v_));
    case 3: {
      std::string out = "(";
      const auto& t = *std::get<3>(v_);
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ',';
        out += t[i].str();
      }
      return out + ")";
    }
    default: {
      char buf[20];
      std::snprintf(buf, sizeof buf, "#%016llx",
                    static_cast<unsigned long long>(std::get<4>(v_)->digest()));
      return buf;
    }
  }
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Value value() {
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '_') {
      ++pos_;
      return {};
    }
    if (c == '(') {
      ++pos_;
      Value::Tuple items;
      if (peek() == ')') {
        ++pos_;
        return Value::tuple(std::move(items));
      }
      while (true) {
        items.push_back(value());
        char d = peek();
        ++pos_;
        if (d == ')') break;
        if (d != ',') fail("expected ',' or ')'");
      }
      return Value::tuple(std::move(items));
    }
    if (c == '#') {
      ++pos_;
      std::uint64_t d = 0;
      auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), d, 16);
      if (ec != std::errc()) fail("bad digest");
      pos_ = static_cast<std::size_t>(p - s_.data());
      return Value::blob(std::make_shared<const DigestBlob>(d));
    }
    if (c == 'p' || c == 'q') {
      ++pos_;
      return ProcessId{c == 'p' ? Role::C : Role::S, static_cast<int>(integer())};
    }
    return Value(integer());
  }

  std::int64_t integer() {
    std::int64_t x = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), x);
    if (ec != std::errc()) fail("bad integer");
    pos_ = static_cast<std::size_t>(p - s_.data());
    return x;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool done() const { return pos_ == s_.size(); }

  [[noreturn]] void fail(const char* what) const {
    throw std::invalid_argument(std::string("value parse: ") + what + " in '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

int kind_rank(const Value& v) {
  if (v.is_bottom()) return 0;
  if (v.is_int()) return 1;
  if (v.is_pid()) return 2;
  if (v.is_tuple()) return 3;
  return 4;
}

}  // namespace

Value Value::parse(std::string_view text) {
  Parser p(text);
  Value v = p.value();
  if (!p.done()) p.fail("trailing characters");
  return v;
}

bool operator==(const Value& a, const Value& b) {
  if (a.v_.index() != b.v_.index()) return false;
  switch (a.v_.index()) {
    case 0:
      return true;
    case 1:
      return std::get<1>(a.v_) == std::get<1>(b.v_);
    case 2:
      return std::get<2>(a.v_) == std::get<2>(b.v_);
    case 3: {
      const auto& x = std::get<3>(a.v_);
      const auto& y = std::get<3>(b.v_);
      return x == y || *x == *y;
    }
    default: {
      const auto& x = std::get<4>(a.v_);
      const auto& y = std::get<4>(b.v_);
      return x == y || x->equals(*y);
    }
  }
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  int ka = kind_rank(a), kb = kind_rank(b);
  if (ka != kb) return ka <=> kb;
  switch (ka) {
    case 0:
      return std::strong_ordering::equal;
    case 1:
      return a.as_int() <=> b.as_int();
    case 2:
      return a.as_pid() <=> b.as_pid();
    case 3: {
      const auto& x = a.as_tuple();
      const auto& y = b.as_tuple();
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        auto c = x[i] <=> y[i];
        if (c != 0) return c;
      }
      return x.size() <=> y.size();
    }
    default:
      if (a == b) return std::strong_ordering::equal;
      return a.as_blob().digest() <=> b.as_blob().digest();
  }
}

}  // namespace efd
