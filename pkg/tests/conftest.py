import pytest

# two annotated loops, one pragma each
EXAMPLE1 = """#pragma omp parallel for 
for (i=0;i<=N;i++)
  A[i] = i;
#pragma omp parallel for
for (i=0;i<=N;i++)
  B[i]=B[i]*2;
"""

# annotated loop with a guarded call
EXAMPLE2 = """#pragma omp parallel for 
for (i=0;i<=N;i++) 
  if (MoreCalc(i))
     Calc(i);
"""

GOLDEN_SOURCE = "for (i = 0; i < len; i++)  a[i] = i;"

# golden rows for GOLDEN_SOURCE, one per view, verbatim apart from whitespace
GOLDEN_VIEWS = {
    "text": "for (i = 0; i < len; i++)  a[i] = i;",
    "r_text": "for (var0 = 0; var0 < var1; var0++) arr0[var0] = var0;",
    "ast": "For: Assignment: = ID: i Constant: int, 0 BinaryOp: < ID: i ID: len UnaryOp: p++ ID: i "
           "Assignment: = ArrayRef: ID: a ID: i ID: i",
    "r_ast": "For: Assignment: = ID: var0 Constant: int, 0 BinaryOp: < ID: var0 ID: var1 UnaryOp: p++ "
             "ID: var0  Assignment: = ArrayRef: ID: arr0 ID: var0 ID: var0",
}

# golden AST dumps for EXAMPLE1 (truncated after the second loop's first child) and EXAMPLE2
TREE_EXAMPLE1 = """For:
  Assignment: =
    ID: i
    Constant: Int, 0
  BinaryOp: <=
    ID: i
    ID: N
  UnaryOp: p++
    ID: i
  Assignment: =
    ArrayRef:
      ID: A
      ID: i
    ID: i
For:
  Assignment: =
    ID: i"""

TREE_EXAMPLE2 = """For:
  Assignment: =
    ID: i
    Constant: Int, 0
  BinaryOp: <=
    ID: i
    ID: N
  UnaryOp: p++
    ID: i
  If:
    FuncCall:
      ID: MoreCalc
      ExprList:
        ID: i
    FuncCall:
      ID: Calc
      ExprList:
        ID: i"""


@pytest.fixture
def example1():
    return EXAMPLE1


@pytest.fixture
def example2():
    return EXAMPLE2
