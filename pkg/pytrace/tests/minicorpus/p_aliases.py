def area(w, h):
    return w * h

def perimeter(w, h):
    return 2 * (w + h)

compute = area
outline = perimeter

def report(w, h):
    return "area=" + str(compute(w, h)) + " perimeter=" + str(outline(w, h))

print(report(3, 4))
