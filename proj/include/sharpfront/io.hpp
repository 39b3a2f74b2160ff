#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sharpfront/errors.hpp"

namespace sharpfront::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Shortest text with 17 significant digits.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("IOError", "sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

/// Writes via a temporary file in the same directory, then renames.
inline void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("IOError", "cannot open " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw Error("IOError", "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace detail {

inline void emit(const json& j, std::string& out, int indent) {
  const std::string pad(indent + 2, ' '), close(indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(k).dump() + ": ";
        emit(v, out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    default: out += j.dump();
  }
}

}  // namespace detail

/// Pretty JSON with every float written to 17 significant digits.
inline std::string dump(const json& j) {
  std::string out;
  detail::emit(j, out, 0);
  return out + "\n";
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) {
    bool first = true;
    for (const auto& h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << "\n";
  }
  Csv& row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      os_ << (first ? "" : ",") << fmt17(v);
      first = false;
    }
    os_ << "\n";
    return *this;
  }
  Csv& row_text(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

/// Collects artifacts of a run and writes the manifest last.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content, const std::string& kind) {
    atomic_write(dir_ / name, content);
    entries_.push_back({{"path", name}, {"kind", kind}, {"bytes", content.size()},
                        {"sha256", sha256_hex(content)}});
  }
  void write_json(const std::string& name, const json& j) { write(name, dump(j), "json"); }
  void write_csv(const std::string& name, const Csv& csv) { write(name, csv.str(), "csv"); }

  void write_manifest(const std::string& command, const std::string& config_hash, int exit_code) {
    json m;
    m["command"] = command;
    m["config_hash"] = config_hash;
    m["exit_code"] = exit_code;
    m["outputs"] = entries_;
    atomic_write(dir_ / "manifest.json", dump(m));
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  json entries_ = json::array();
};

}  // namespace sharpfront::io
