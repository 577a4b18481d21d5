// Placeholder main; the full CLI lands with the semantic modules.
#include <cstdio>

int main() {
  std::puts("ll: not yet wired");
  return 2;
}
