void mix2(double **a, int n, int m)
{
  int i, j;
#pragma omp parallel for private(j)
  for (i = 0; i < n; i++)
    for (j = 0; j < m; j++)
      a[i][j] = a[i][j] * 0.5;
}
