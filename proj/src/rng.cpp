#include "essi/rng.hpp"

namespace essi {

Seed mix_seed(Seed x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> path) {
  Seed h = mix_seed(parent);
  for (auto key : path) h = mix_seed(h ^ mix_seed(key + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace essi
