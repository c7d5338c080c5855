// Writes the corpus documents into a directory (default: data).
#include <filesystem>
#include <fstream>
#include <iostream>

#include "support/documents.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  for (const auto& [name, doc] : sca::corpus::documents()) {
    std::ofstream out(dir / name);
    out << doc.dump(2) << "\n";
    if (!out) {
      std::cerr << "cannot write " << (dir / name) << "\n";
      return 1;
    }
  }
  return 0;
}
