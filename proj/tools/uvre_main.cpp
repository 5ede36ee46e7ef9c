#include <cstdio>

int main() {
  std::puts("uvre: subcommands not wired yet");
  return 0;
}
