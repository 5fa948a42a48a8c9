#include "cli.hpp"

int main(int argc, char** argv)
{
    return desvr::cli::run(argc, argv);
}
