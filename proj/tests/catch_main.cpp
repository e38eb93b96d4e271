#define CATCH_CONFIG_RUNNER
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

int main(int argc, char* argv[]) {
    // single-threaded BLAS keeps expected values reproducible
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);
    return Catch::Session().run(argc, argv);
}
