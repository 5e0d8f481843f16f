class Box {
    int w;
    int h;
    Box() {
        this(1, 1);
    }
    Box(int w, int h) {
        this.w = w;
        this.h = h;
    }
    int area() {
        return w * h;
    }
}
class Cube extends Box {
    Cube(int side) {
        super(side, side);
    }
}
public class Main {
    public static void main(String[] args) {
        Box unit = new Box();
        Cube c = new Cube(3);
        System.out.println(unit.area() + c.area());
    }
}
