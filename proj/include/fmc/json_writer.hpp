#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fmc {

/// Insertion-ordered JSON tree with a byte-deterministic writer. Output
/// reports go through this rather than a general JSON library so that key
/// order and float formatting are pinned: identical values always produce
/// identical bytes, and every real is written with 17 significant digits so
/// a reader recovers it exactly.
class JsonValue {
 public:
  JsonValue() : node_(nullptr) {}

  static JsonValue object() {
    JsonValue v;
    v.node_ = Members{};
    return v;
  }
  static JsonValue array() {
    JsonValue v;
    v.node_ = Elements{};
    return v;
  }
  static JsonValue null() { return JsonValue(); }
  static JsonValue boolean(bool b) {
    JsonValue v;
    v.node_ = b;
    return v;
  }
  static JsonValue integer(std::uint64_t i) {
    JsonValue v;
    v.node_ = i;
    return v;
  }
  /// Non-finite doubles have no JSON representation; they become null.
  static JsonValue number(double d) {
    JsonValue v;
    if (std::isfinite(d)) v.node_ = d;
    return v;
  }
  static JsonValue number(std::optional<double> d) {
    return d ? number(*d) : null();
  }
  static JsonValue boolean(std::optional<bool> b) {
    return b ? boolean(*b) : null();
  }
  static JsonValue string(std::string s) {
    JsonValue v;
    v.node_ = std::move(s);
    return v;
  }

  JsonValue& add(std::string key, JsonValue value) {
    std::get<Members>(node_).emplace_back(std::move(key), std::move(value));
    return *this;
  }

  JsonValue& push(JsonValue value) {
    std::get<Elements>(node_).push_back(std::move(value));
    return *this;
  }

  std::string dump() const {
    std::string out;
    write(out);
    return out;
  }

 private:
  struct Member;
  using Members = std::vector<Member>;
  using Elements = std::vector<JsonValue>;
  using Node = std::variant<std::nullptr_t, bool, std::uint64_t, double,
                            std::string, Elements, Members>;

  static void write_escaped(const std::string& s, std::string& out) {
    out += '"';
    for (const char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    out += '"';
  }

  void write(std::string& out) const {
    if (std::holds_alternative<std::nullptr_t>(node_)) {
      out += "null";
    } else if (const auto* b = std::get_if<bool>(&node_)) {
      out += *b ? "true" : "false";
    } else if (const auto* i = std::get_if<std::uint64_t>(&node_)) {
      out += std::to_string(*i);
    } else if (const auto* d = std::get_if<double>(&node_)) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", *d);
      out += buf;
    } else if (const auto* s = std::get_if<std::string>(&node_)) {
      write_escaped(*s, out);
    } else if (const auto* elems = std::get_if<Elements>(&node_)) {
      out += '[';
      for (std::size_t i = 0; i < elems->size(); ++i) {
        if (i > 0) out += ',';
        (*elems)[i].write(out);
      }
      out += ']';
    } else {
      const auto& members = std::get<Members>(node_);
      out += '{';
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (i > 0) out += ',';
        write_escaped(members[i].key, out);
        out += ':';
        members[i].value.write(out);
      }
      out += '}';
    }
  }

  Node node_;
};

struct JsonValue::Member {
  Member(std::string k, JsonValue v) : key(std::move(k)), value(std::move(v)) {}
  std::string key;
  JsonValue value;
};

}  // namespace fmc
