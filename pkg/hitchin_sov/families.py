import hitchin_sov

hitchin_sov.register('A',  # The family letter
    # Human readable name of the Lie algebra
    name='sl(n+1)',
    # Degrees of the fundamental invariants, as a function of the rank
    degrees=hitchin_sov.consecutive_degrees(2),
    # Dimension of the standard representation; this is the degree of R in λ
    rep_dim=lambda n: n + 1,
    # Dimension of the Lie algebra
    dimension=lambda n: n * (n + 2),
)

hitchin_sov.register('B',
    name='so(2n+1)',
    degrees=hitchin_sov.even_degrees(lambda n: n),
    rep_dim=lambda n: 2 * n + 1,
    dimension=lambda n: n * (2 * n + 1),
)

hitchin_sov.register('C',
    name='sp(2n)',
    degrees=hitchin_sov.even_degrees(lambda n: n),
    rep_dim=lambda n: 2 * n,
    dimension=lambda n: n * (2 * n + 1),
)

hitchin_sov.register('D',
    name='so(2n)',
    # The Pfaffian is listed separately: it enters R squared, at λ^0
    degrees=hitchin_sov.even_degrees(lambda n: n - 1),
    pfaffian_degree=lambda n: n,
    rep_dim=lambda n: 2 * n,
    dimension=lambda n: n * (2 * n - 1),
    # D_2 = so(4) is allowed; it is the case solvable in radicals
    min_rank=2,
)
