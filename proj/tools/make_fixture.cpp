// Writes the bundled 12-video synthetic corpus: make_fixture <dir> [seed]
#include <cstdlib>
#include <iostream>

#include "mediabar/error.hpp"
#include "mediabar/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_fixture <dir> [seed]\n";
    return 2;
  }
  const std::uint64_t seed = argc == 3 ? std::strtoull(argv[2], nullptr, 10) : 2024;
  try {
    const auto fx = mediabar::synthetic::write_bundled_fixture(argv[1], seed);
    std::cout << fx.manifest.string() << "\n";
  } catch (const mediabar::Error& e) {
    std::cerr << "make_fixture: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
