"""Plain-loop recurrence counting used as an oracle for crisisgc.rqa."""


def brute_counts(values, epsilon, l_min=2, v_min=2):
    n = len(values)
    R = [[i != j and abs(values[i] - values[j]) < epsilon for j in range(n)] for i in range(n)]
    n_rec = sum(sum(row) for row in R)

    n_diag = 0
    for k in range(-(n - 1), n):
        if k == 0:
            continue
        run = 0
        cells = [(i, i + k) for i in range(n) if 0 <= i + k < n]
        for cell in cells + [None]:
            if cell is not None and R[cell[0]][cell[1]]:
                run += 1
                continue
            if run >= l_min:
                n_diag += run
            run = 0

    n_vert = 0
    for j in range(n):
        run = 0
        for i in list(range(n)) + [None]:
            if i is not None and R[i][j]:
                run += 1
                continue
            if run >= v_min:
                n_vert += run
            run = 0
    return n_rec, n_diag, n_vert


def brute_quantifiers(values, epsilon, l_min=2, v_min=2):
    n = len(values)
    n_rec, n_diag, n_vert = brute_counts(values, epsilon, l_min, v_min)
    rr = 100.0 * n_rec / (n * n - n)
    if n_rec == 0:
        return rr, 0.0, 0.0
    return rr, 100.0 * n_diag / n_rec, 100.0 * n_vert / n_rec
