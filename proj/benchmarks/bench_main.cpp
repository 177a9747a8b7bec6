#include <benchmark/benchmark.h>

// The distro libbenchmark_main.a is LTO bytecode from another compiler
// release; the shared library links fine.
BENCHMARK_MAIN();
