interface Greeter {
    String greet(String name);
}
class Formal implements Greeter {
    public String greet(String name) {
        return "Good day, " + name;
    }
}
class Casual implements Greeter {
    public String greet(String name) {
        return "yo " + name;
    }
}
public class Main {
    static String welcome(Greeter g, String name) {
        return g.greet(name);
    }
    public static void main(String[] args) {
        System.out.println(welcome(new Formal(), "Ada"));
        System.out.println(welcome(new Casual(), "Bob"));
    }
}
