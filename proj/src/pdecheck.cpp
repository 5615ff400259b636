namespace planefield::pdecheck {}
