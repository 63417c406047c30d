#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcd {

// %.17g round-trips doubles and keeps outputs byte-stable across runs
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV with '#' metadata lines, written atomically (tmp + rename).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& meta) : path_(path) {
    os_.open(path + ".tmp");
    if (!os_) throw std::runtime_error("CsvWriter: cannot open " + path);
    if (!meta.empty()) os_ << meta;
  }
  void header(const std::string& h) { os_ << h << "\n"; }
  void row(std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
      if (!first) os_ << ",";
      os_ << fmt_double(v);
      first = false;
    }
    os_ << "\n";
  }
  void raw_row(const std::string& s) { os_ << s << "\n"; }
  void close() {
    if (closed_) return;
    os_.close();
    if (std::rename((path_ + ".tmp").c_str(), path_.c_str()) != 0)
      throw std::runtime_error("CsvWriter: rename failed for " + path_);
    closed_ = true;
  }
  ~CsvWriter() {
    try { close(); } catch (...) {}
  }

 private:
  std::string path_;
  std::ofstream os_;
  bool closed_ = false;
};

}  // namespace lcd
