#include "cascade_branch/cli.hpp"

int main(int argc, char** argv)
{
    return cascade_branch::cli::run(argc, argv);
}
