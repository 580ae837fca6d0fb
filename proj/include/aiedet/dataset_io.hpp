#pragma once

// Text dataset format "HCD1" for feeding pre-split radar data to the
// detectors:
//
//   HCD1 N=<n> K=<k> L=<l> P=<p>
//   Z
//   <N rows of K entries>
//   ZL
//   <N rows of L entries>
//   H
//   <N rows of p entries>
//
// Entries are written as `re+imj` (or `re-imj`) and separated by single
// spaces. Lines starting with '#' are comments; the first one is kept as
// the dataset's source description. Floats are written in shortest
// round-trip form, so save/load reproduces every matrix bit for bit.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "aiedet/core.hpp"

namespace aiedet {

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& source, std::size_t line, std::size_t offset,
               const std::string& msg);
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

struct ExternalDataset {
  DetectionInput input;
  std::string source;
};

ExternalDataset parse_dataset(std::istream& in, const std::string& source_name = "dataset");
ExternalDataset load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const DetectionInput& input,
                   const std::string& source = {});
void save_dataset(const std::filesystem::path& path, const DetectionInput& input,
                  const std::string& source = {});

/// Formats a double in shortest round-trip form.
std::string format_double(double v);

}  // namespace aiedet
