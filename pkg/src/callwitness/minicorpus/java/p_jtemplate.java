class Report {
    String title() {
        return "report";
    }
    String render() {
        return title() + "!";
    }
}
class SalesReport extends Report {
    String title() {
        return "sales";
    }
}
public class Main {
    public static void main(String[] args) {
        Report plain = new Report();
        Report sales = new SalesReport();
        System.out.println(plain.render());
        System.out.println(sales.render());
    }
}
