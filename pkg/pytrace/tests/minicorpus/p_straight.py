def add(a, b):
    return a + b

def scale(x):
    return add(x, x) + add(x, 1)

def total(xs):
    out = 0
    for x in xs:
        out = out + scale(x)
    return out

print(total([1, 2]))
