#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sos/sdp.hpp"

namespace sos {

// Sparse SDPA reads as: max F_0 . Y  s.t.  F_i . Y = c_i, Y psd (the "dual"
// side of the format). Our problem min C . X, A_i . X = b_i maps onto it with
// F_0 = -C, F_i = A_i, c = b.
void write_sdpa(const SdpProblem& problem, std::ostream& out) {
  out << problem.constraints.size() << " =mdim\n";
  out << problem.block_dims.size() << " =nblocks\n";
  for (size_t b = 0; b < problem.block_dims.size(); ++b)
    out << problem.block_dims[b] << (b + 1 < problem.block_dims.size() ? " " : "\n");
  if (problem.block_dims.empty()) out << "\n";
  out << std::setprecision(17);
  for (size_t k = 0; k < problem.constraints.size(); ++k)
    out << problem.constraints[k].rhs
        << (k + 1 < problem.constraints.size() ? " " : "\n");
  if (problem.constraints.empty()) out << "\n";
  for (auto& e : problem.objective)
    out << 0 << " " << e.block + 1 << " " << e.i + 1 << " " << e.j + 1 << " "
        << -e.value << "\n";
  for (size_t k = 0; k < problem.constraints.size(); ++k)
    for (auto& e : problem.constraints[k].entries)
      out << k + 1 << " " << e.block + 1 << " " << e.i + 1 << " " << e.j + 1
          << " " << e.value << "\n";
}

SdpProblem read_sdpa(std::istream& in) {
  auto next_data_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      size_t p = line.find_first_not_of(" \t\r");
      if (p == std::string::npos) continue;
      if (line[p] == '"' || line[p] == '*') continue;
      return true;
    }
    return false;
  };

  SdpProblem p;
  std::string line;
  if (!next_data_line(line)) throw std::runtime_error("sdpa: missing mdim");
  int m = std::stoi(line);
  if (!next_data_line(line)) throw std::runtime_error("sdpa: missing nblocks");
  int nb = std::stoi(line);
  if (!next_data_line(line)) throw std::runtime_error("sdpa: missing dims");
  {
    std::istringstream s(line);
    for (int b = 0; b < nb; ++b) {
      int d;
      std::string tok;
      if (!(s >> tok)) throw std::runtime_error("sdpa: short dim line");
      // strip punctuation some writers add, e.g. "{2,3}"
      std::string num;
      for (char c : tok)
        if (c == '-' || (c >= '0' && c <= '9')) num += c;
      d = std::stoi(num);
      p.block_dims.push_back(std::abs(d));  // diagonal blocks read as dense
    }
  }
  if (!next_data_line(line)) throw std::runtime_error("sdpa: missing rhs");
  {
    std::istringstream s(line);
    for (int k = 0; k < m; ++k) {
      double v;
      if (!(s >> v)) throw std::runtime_error("sdpa: short rhs line");
      p.constraints.push_back({{}, v});
    }
  }
  while (next_data_line(line)) {
    std::istringstream s(line);
    int mat, blk, i, j;
    double v;
    if (!(s >> mat >> blk >> i >> j >> v)) continue;
    SdpEntry e{blk - 1, i - 1, j - 1, v};
    if (e.i > e.j) std::swap(e.i, e.j);
    if (mat == 0) {
      e.value = -v;
      p.objective.push_back(e);
    } else {
      p.constraints[mat - 1].entries.push_back(e);
    }
  }
  p.mode = p.objective.empty() ? SdpProblem::Mode::kFeasibility
                               : SdpProblem::Mode::kMinimize;
  return p;
}

void write_sdpa_file(const SdpProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_sdpa(problem, out);
}

SdpProblem read_sdpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_sdpa(in);
}

}  // namespace sos
